#include <iostream>

#include "gsr/cli.hpp"

int main(int argc, char** argv)
{
    return gsr::run_cli(argc, argv, std::cout, std::cerr);
}
