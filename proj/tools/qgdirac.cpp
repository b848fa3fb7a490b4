#include "qgdirac/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return qgdirac::run(argc, argv, std::cout, std::cerr);
}
