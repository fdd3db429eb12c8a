#include "sfem/cli.hpp"

int main(int argc, char** argv) { return sfem::cli::main(argc, argv); }
