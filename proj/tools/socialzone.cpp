#include <socialzone/cli.hpp>

int main(int argc, char ** argv) { return socialzone::run_cli(argc, argv); }
