#include <mofpca/harness.hpp>

int main(int argc, char** argv) { return mofpca::harness::run_cli(argc, argv); }
