#include <iostream>

#include "qhl/cli.hpp"

int main(int argc, char** argv) {
    return qhl::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
