#include "pixelarray/cli.hpp"

int main(int argc, char** argv) { return pixelarray::cli::run(argc, argv); }
