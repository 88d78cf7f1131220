#include "orns/cli.hpp"

int main(int argc, char** argv) { return orns::cli::run(argc, argv); }
