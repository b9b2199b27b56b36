#include <speckle/cli.hpp>

int main(int argc, char** argv)
{
  return speckle::cli::cli_main(argc, argv);
}
