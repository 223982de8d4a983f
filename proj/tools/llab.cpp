#include <cstdlib>
#include <string>
#include <vector>

#include "llab/run_config.hpp"

int main(int argc, char** argv) {
  // cap BLAS threads before the first LAPACK call
  if (const char* cap = std::getenv("LLAB_THREADS"))
    setenv("OPENBLAS_NUM_THREADS", cap, /*overwrite=*/0);
  return llab::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
