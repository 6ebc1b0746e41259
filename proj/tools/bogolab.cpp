#include "bogolab/cli.hpp"

int main(int argc, char** argv) { return bogolab::cli::main_entry(argc, argv); }
