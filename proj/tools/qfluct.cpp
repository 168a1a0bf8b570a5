#include "qfluct/cli.hpp"

int main(int argc, char** argv) { return qfluct::cli::run(argc, argv); }
