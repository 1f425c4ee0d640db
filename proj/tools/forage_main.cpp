#include "forage/cli.h"

int main(int argc, char** argv) { return forage::cli_main(argc, argv); }
