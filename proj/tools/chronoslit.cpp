#include <string>
#include <vector>

#include "chronoslit/cli.hpp"

int main(int argc, char** argv) {
  return chronoslit::run_cli(std::vector<std::string>(argv, argv + argc));
}
