#include "errlens/cli.hpp"

int main(int argc, char** argv) { return errlens::cli::run(argc, argv, errlens::cli::Environment::process()); }
