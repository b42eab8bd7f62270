#include <string>
#include <vector>

#include "ritype/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ritype::cli::run(std::move(args));
}
