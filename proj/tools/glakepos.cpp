#include "glakepos/cli.hpp"

int main(int argc, char** argv) { return glakepos::cli::dispatch(argc, argv); }
