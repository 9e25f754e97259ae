#include <iostream>
#include <string>
#include <vector>

#include "conceptbase/shell.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return conceptbase::execute(args, std::cout, std::cerr, std::cin);
}
