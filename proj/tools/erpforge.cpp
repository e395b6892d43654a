#include <vector>

#include "erpforge/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return erpforge::run_cli(args);
}
