#include "imverde/commands.hpp"

int main(int argc, char** argv) { return imverde::run_cli(argc, argv); }
