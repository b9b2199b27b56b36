#ifndef SPECKLE_NET_HPP
#define SPECKLE_NET_HPP

#include <speckle/cgi.hpp>
#include <speckle/core.hpp>
#include <speckle/random.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

/// The multi-branch pattern generator: per branch, two convolution layers
/// (reflection pad, correlate, ReLU, instance normalization) whose output
/// stack is scored by the ghost-imaging loss and trained with SGD momentum.
/// Gradients are derived by hand.
namespace speckle
{

/// N kernels plus one normalization affine pair per output channel.
struct LayerParams
{
  std::vector<Kernel> kernels;
  Eigen::VectorXd bnScale;
  Eigen::VectorXd bnShift;

  std::size_t count() const { return kernels.size(); }
  Index kernel_size() const { return kernels.empty() ? 0 : kernels.front().rows(); }

  /// Same shape, all zeros.
  LayerParams zeros_like() const;

  /// Throws unless kernel, scale and shift counts agree and kernels are square.
  void validate() const;

  friend bool operator==(const LayerParams& a, const LayerParams& b);
};

struct Branch
{
  LayerParams layer1;
  LayerParams layer2;

  std::size_t count() const { return layer1.count(); }
  Branch zeros_like() const { return {layer1.zeros_like(), layer2.zeros_like()}; }
  void validate() const;

  friend bool operator==(const Branch& a, const Branch& b)
  {
    return a.layer1 == b.layer1 && a.layer2 == b.layer2;
  }
};

/// Parameters laid out as layer1 kernels (column-major), scale, shift, then
/// the same for layer2.
Eigen::VectorXd flatten(const Branch& b);
void unflatten(const Eigen::VectorXd& values, Branch& b);

/// Denominator of the normalized reconstruction error.
enum class LossNormalization
{
  /// (G - X) / std(G) over all pixels. Invariant to offset and scale of G
  /// and bounded in [0, 1].
  Deviation,
  /// (G - X) / <G_o>. Admits a zero-loss optimum where every pattern shares
  /// one global brightness modulation and G is flat.
  ObjectMean,
};

std::string to_string(LossNormalization n);
LossNormalization parse_loss_normalization(const std::string& name);

struct TrainConfig
{
  /// Sampling ratio, patterns per pixel.
  double beta = 0.01;
  double learningRate = 0.01;
  double momentum = 0.9;
  double weightDecay = 1e-3;
  int epochs = 200;
  int batchSize = 32;
  int rounds = 3;
  double bnEpsilon = 1e-5;
  std::uint64_t seed = 0;
  Index kernelSize = 10;
  LossNormalization loss = LossNormalization::Deviation;

  void validate() const;
};

/// Optimizer state for one branch.
struct TrainState
{
  Branch branch;
  Branch velocity;
  std::vector<double> epochLosses;
  Rng rng;
  std::uint64_t steps = 0;
};

/// floor(beta * nPixel); throws when the result is zero.
std::size_t pattern_count(double beta, std::size_t nPixel);

/// Kernels uniform in [-1/k, 1/k], scale 1, shift 0.
Branch init_branch(std::size_t n, Index kernelSize, std::uint64_t seed);

/// Kernel i for output i applies to the shared input (fan-out) or to input i
/// (depthwise).
enum class LayerMode
{
  FanOut,
  Depthwise,
};

struct LayerCache
{
  LayerMode mode = LayerMode::FanOut;
  Index rows = 0;
  Index cols = 0;
  Padding padding;
  /// Reflect-padded inputs; a single entry in fan-out mode.
  std::vector<Pattern> padded;
  /// Correlation output before ReLU.
  std::vector<Pattern> preActivation;
  /// (relu - mean) / sqrt(var + eps).
  std::vector<Pattern> normalized;
  Eigen::VectorXd invStd;
};

PatternStack layer_forward(const Pattern& input, const LayerParams& layer,
                           double bnEpsilon, LayerCache* cache = nullptr);
PatternStack layer_forward(const PatternStack& input, const LayerParams& layer,
                           double bnEpsilon, LayerCache* cache = nullptr);

struct LayerGradients
{
  LayerParams params;
  /// Empty unless requested.
  std::vector<Pattern> input;
};

LayerGradients layer_backward(const LayerCache& cache, const LayerParams& layer,
                              std::span<const Pattern> gradOutput,
                              bool needInputGradient);

/// The fixed input of a branch: the initial pattern or a frozen stack.
using BranchInput = std::variant<Pattern, PatternStack>;

struct BranchCache
{
  LayerCache layer1;
  LayerCache layer2;
  /// Layer-2 output before the non-negativity clamp.
  std::vector<Pattern> preClamp;
};

/// layer1, layer2, then max(., 0).
PatternStack branch_forward(const BranchInput& input, const Branch& b,
                            double bnEpsilon, BranchCache* cache = nullptr);

/// Gradient of every branch parameter given dLoss/dOutput.
Branch branch_backward(const BranchCache& cache, const Branch& b,
                       std::span<const Pattern> gradOutput);

/// Normalized ghost-imaging MSE and the quantities needed to differentiate it.
struct LossResult
{
  double loss = 0.0;
  Pattern g;
  Pattern reference;
  double objectMean = 0.0;
  double backgroundMean = 0.0;
  /// The denominator actually used.
  double scale = 0.0;
  LossNormalization normalization = LossNormalization::Deviation;
  BucketSeries buckets;
};

/// Reference X takes the object-region mean of G on transmitting pixels and
/// the background mean elsewhere; loss = mean(((G - X) / scale)^2).
LossResult loss_forward(const PatternStack& stack, const ObjectImage& obj,
                        LossNormalization norm = LossNormalization::Deviation);

/// dLoss/dP_j with X held constant. A deviation denominator is differentiated
/// through G; an object-mean denominator is held constant.
std::vector<Pattern> loss_backward(const LossResult& forward,
                                   const PatternStack& stack,
                                   const ObjectImage& obj,
                                   double upstream = 1.0);

/// Parameter gradients for a single object: forward, loss, backward.
Branch backward(const BranchInput& input, const Branch& b,
                const ObjectImage& obj, double bnEpsilon,
                LossNormalization norm = LossNormalization::Deviation,
                double* loss = nullptr);

struct SgdmParams
{
  double learningRate = 0.01;
  double momentum = 0.9;
  double weightDecay = 1e-3;
};

/// v <- momentum v + (grad + weightDecay param); param <- param - lr v.
void sgdm_step(Eigen::Ref<Eigen::VectorXd> params,
               Eigen::Ref<Eigen::VectorXd> velocity,
               const Eigen::Ref<const Eigen::VectorXd>& grad,
               const SgdmParams& hyper);

void sgdm_step(TrainState& state, const Branch& gradients,
               const TrainConfig& cfg);

/// Called once per finished epoch with (round, epoch, mean loss).
using ProgressFn = std::function<void(std::size_t, int, double)>;

struct RoundResult
{
  TrainState state;
  /// The frozen input this round consumed (one pattern in fan-out rounds).
  PatternStack input;
  PatternStack output;
};

/// Train one branch for cfg.epochs epochs on seeded shuffles of the objects.
RoundResult train_round(const BranchInput& input,
                        std::span<const ObjectImage> objects,
                        const TrainConfig& cfg, std::size_t roundIndex = 0,
                        const ProgressFn& progress = {});

struct PipelineResult
{
  std::vector<RoundResult> rounds;
  /// Clamped non-negative and min-max scaled to [0, 1] over the whole stack.
  PatternStack exported;
};

/// Round 1 fans the initial pattern out to N patterns; each later round
/// refines the previous round's frozen output.
PipelineResult train_pipeline(const Pattern& initial,
                              std::span<const ObjectImage> objects,
                              const TrainConfig& cfg,
                              const ProgressFn& progress = {});

/// Clamp to >= 0 then min-max scale the whole stack to [0, 1].
PatternStack normalize_stack(const PatternStack& stack);

} // namespace speckle

#endif // SPECKLE_NET_HPP
