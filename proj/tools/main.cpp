#include "commands.hpp"

int main(int argc, char** argv) { return cavcoord::cli::main_entry(argc, argv); }
