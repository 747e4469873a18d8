#include "cli_app.hpp"

int main(int argc, char** argv) { return nsi::cli::main_entry(argc, argv); }
