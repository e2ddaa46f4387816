#include "vsl/cli.hpp"

int main(int argc, char** argv) { return vsl::cli::main(argc, argv); }
