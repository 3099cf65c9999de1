#include "stunmix/cli.hpp"

int main(int argc, char** argv) { return stunmix::run_cli(argc, argv); }
