#include "qtc/cli.hpp"

int main(int argc, char** argv) { return qtc::cli::run(argc, argv); }
