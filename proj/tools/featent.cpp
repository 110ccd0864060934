#include <string>
#include <vector>

#include "featent/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return featent::cli::run(args);
}
