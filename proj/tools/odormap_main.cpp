#include <string>
#include <vector>

#include "odormap/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return odormap::cli::dispatch(args);
}
