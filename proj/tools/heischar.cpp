#include "heischar/cli.hpp"

int main(int argc, char** argv) { return heischar::cli::main(argc, argv); }
