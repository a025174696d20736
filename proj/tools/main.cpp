#include "commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return ftc::app::run(argc, argv, std::cout, std::cerr); }
