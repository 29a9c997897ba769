#include "sphint/cli.hpp"

int main(int argc, char** argv) { return sphint::cli::main_entry(argc, argv); }
