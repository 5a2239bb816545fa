#include "zoll/lab.hpp"

int main(int argc, char** argv) {
  return zoll::lab::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
