#ifndef SPECKLE_CHECKPOINT_HPP
#define SPECKLE_CHECKPOINT_HPP

#include <speckle/net.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace speckle
{

inline constexpr const char* kCheckpointFormat = "speckle-checkpoint";
inline constexpr int kCheckpointVersion = 1;

/// Training configuration plus the optimizer state of every round.
struct Checkpoint
{
  TrainConfig config;
  std::vector<TrainState> rounds;
};

/// JSON text; doubles are written in shortest round-trip form so a parse of
/// the output reproduces every value bit for bit.
std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(std::string_view text);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace speckle

#endif // SPECKLE_CHECKPOINT_HPP
