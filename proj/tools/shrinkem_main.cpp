#include "shrinkem/cli.hpp"

int main(int argc, char** argv) { return shrinkem::cli::run(argc, argv); }
