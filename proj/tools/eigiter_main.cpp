#include <iostream>

#include <eigiter/cli.hpp>

int main(int argc, char** argv) {
    return eigiter::cli::run_cli(argc, argv, std::cout, std::cerr);
}
