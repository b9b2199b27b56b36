#include <speckle/net.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace speckle
{

// --- parameters -------------------------------------------------------------

LayerParams LayerParams::zeros_like() const
{
  LayerParams z;
  z.kernels.reserve(kernels.size());
  for (const auto& k : kernels)
    z.kernels.push_back(Kernel::Zero(k.rows(), k.cols()));
  z.bnScale = Eigen::VectorXd::Zero(bnScale.size());
  z.bnShift = Eigen::VectorXd::Zero(bnShift.size());
  return z;
}

void LayerParams::validate() const
{
  const auto n = static_cast<Index>(kernels.size());
  if (n == 0)
    throw ShapeError("layer has no kernels");
  if (bnScale.size() != n || bnShift.size() != n)
    throw ShapeError("layer normalization parameters do not match kernel count");
  const Index k = kernels.front().rows();
  for (const auto& kernel : kernels)
    if (kernel.rows() != k || kernel.cols() != k || k < 1)
      throw ShapeError("layer kernels must be square and equally sized");
}

bool operator==(const LayerParams& a, const LayerParams& b)
{
  if (a.kernels.size() != b.kernels.size() ||
      a.bnScale.size() != b.bnScale.size() ||
      a.bnShift.size() != b.bnShift.size())
    return false;
  for (std::size_t i = 0; i < a.kernels.size(); ++i)
    if (a.kernels[i].rows() != b.kernels[i].rows() ||
        a.kernels[i].cols() != b.kernels[i].cols() ||
        a.kernels[i] != b.kernels[i])
      return false;
  return a.bnScale == b.bnScale && a.bnShift == b.bnShift;
}

void Branch::validate() const
{
  layer1.validate();
  layer2.validate();
  if (layer1.count() != layer2.count())
    throw ShapeError("branch layers must share the channel count");
}

namespace
{

Index parameter_count(const LayerParams& l)
{
  Index total = l.bnScale.size() + l.bnShift.size();
  for (const auto& k : l.kernels)
    total += k.size();
  return total;
}

template <typename Layer, typename Visit>
void visit_layer(Layer& l, Visit&& visit)
{
  for (auto& k : l.kernels)
    visit(k.reshaped());
  visit(l.bnScale);
  visit(l.bnShift);
}

} // namespace

Eigen::VectorXd flatten(const Branch& b)
{
  Eigen::VectorXd out(parameter_count(b.layer1) + parameter_count(b.layer2));
  Index offset = 0;
  auto take = [&](const auto& block) {
    out.segment(offset, block.size()) = block;
    offset += block.size();
  };
  visit_layer(b.layer1, take);
  visit_layer(b.layer2, take);
  return out;
}

void unflatten(const Eigen::VectorXd& values, Branch& b)
{
  if (values.size() != parameter_count(b.layer1) + parameter_count(b.layer2))
    throw ShapeError("parameter vector does not match branch shape");
  Index offset = 0;
  auto give = [&](auto&& block) {
    block = values.segment(offset, block.size());
    offset += block.size();
  };
  visit_layer(b.layer1, give);
  visit_layer(b.layer2, give);
}

void TrainConfig::validate() const
{
  if (!(beta > 0 && beta <= 1))
    throw InvalidArgument("beta must lie in (0, 1]");
  if (!(learningRate > 0))
    throw InvalidArgument("learning_rate must be positive");
  if (!(momentum > 0 && momentum < 1))
    throw InvalidArgument("momentum must lie in (0, 1)");
  if (!(weightDecay >= 0))
    throw InvalidArgument("weight_decay must be non-negative");
  if (epochs < 1)
    throw InvalidArgument("epochs must be at least 1");
  if (batchSize < 1)
    throw InvalidArgument("batch_size must be at least 1");
  if (rounds < 1)
    throw InvalidArgument("rounds must be at least 1");
  if (!(bnEpsilon > 0))
    throw InvalidArgument("bn_epsilon must be positive");
  if (kernelSize < 1)
    throw InvalidArgument("kernel_size must be at least 1");
}

std::size_t pattern_count(double beta, std::size_t nPixel)
{
  if (!(beta > 0 && beta <= 1))
    throw InvalidArgument("beta must lie in (0, 1]");
  if (nPixel < 1)
    throw InvalidArgument("pixel count must be positive");
  // The slack absorbs products such as 0.29 * 100 = 28.999999999999996.
  const double n = std::floor(beta * static_cast<double>(nPixel) + 1e-9);
  if (n < 1)
    throw InvalidArgument("beta " + std::to_string(beta) +
                          " yields no patterns on a grid of " +
                          std::to_string(nPixel) + " pixels");
  return static_cast<std::size_t>(n);
}

Branch init_branch(std::size_t n, Index kernelSize, std::uint64_t seed)
{
  if (n < 1)
    throw InvalidArgument("branch needs at least one channel");
  if (kernelSize < 1)
    throw InvalidArgument("kernel size must be at least 1");

  Rng rng(seed);
  const double bound = 1.0 / static_cast<double>(kernelSize);
  auto make_layer = [&] {
    LayerParams l;
    l.kernels.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
    {
      Kernel k(kernelSize, kernelSize);
      for (Index j = 0; j < k.size(); ++j)
        k(j) = rng.uniform(-bound, bound);
      l.kernels.push_back(std::move(k));
    }
    l.bnScale = Eigen::VectorXd::Ones(static_cast<Index>(n));
    l.bnShift = Eigen::VectorXd::Zero(static_cast<Index>(n));
    return l;
  };
  Branch b;
  b.layer1 = make_layer();
  b.layer2 = make_layer();
  return b;
}

// --- layers -----------------------------------------------------------------

namespace
{

PatternStack forward_impl(std::span<const Pattern> inputs, LayerMode mode,
                          const LayerParams& layer, double bnEpsilon,
                          LayerCache* cache)
{
  layer.validate();
  const std::size_t n = layer.count();
  if (mode == LayerMode::Depthwise && inputs.size() != n)
    throw ShapeError("depthwise layer expects " + std::to_string(n) +
                     " input patterns, got " + std::to_string(inputs.size()));

  const Index rows = inputs.front().rows();
  const Index cols = inputs.front().cols();
  const Padding pad = Padding::same(layer.kernel_size());

  std::vector<Pattern> padded;
  padded.reserve(inputs.size());
  for (const auto& in : inputs)
    padded.push_back(reflect_pad(in, pad));

  if (cache)
  {
    cache->mode = mode;
    cache->rows = rows;
    cache->cols = cols;
    cache->padding = pad;
    cache->preActivation.clear();
    cache->normalized.clear();
    cache->invStd.resize(static_cast<Index>(n));
  }

  std::vector<Pattern> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    const Pattern& src = padded[mode == LayerMode::FanOut ? 0 : i];
    Pattern pre = correlate2d(src, layer.kernels[i]);
    const Pattern relu = pre.cwiseMax(0.0);
    const double mean = relu.mean();
    const double var = (relu.array() - mean).square().mean();
    const double invStd = 1.0 / std::sqrt(var + bnEpsilon);
    Pattern normalized = (relu.array() - mean) * invStd;

    const auto idx = static_cast<Index>(i);
    out.push_back((layer.bnScale(idx) * normalized.array() + layer.bnShift(idx))
                      .matrix());
    if (cache)
    {
      cache->preActivation.push_back(std::move(pre));
      cache->normalized.push_back(std::move(normalized));
      cache->invStd(idx) = invStd;
    }
  }
  if (cache)
    cache->padded = std::move(padded);
  return PatternStack(std::move(out));
}

} // namespace

PatternStack layer_forward(const Pattern& input, const LayerParams& layer,
                           double bnEpsilon, LayerCache* cache)
{
  return forward_impl(std::span<const Pattern>(&input, 1), LayerMode::FanOut,
                      layer, bnEpsilon, cache);
}

PatternStack layer_forward(const PatternStack& input, const LayerParams& layer,
                           double bnEpsilon, LayerCache* cache)
{
  return forward_impl(input.patterns(), LayerMode::Depthwise, layer, bnEpsilon,
                      cache);
}

LayerGradients layer_backward(const LayerCache& cache, const LayerParams& layer,
                              std::span<const Pattern> gradOutput,
                              bool needInputGradient)
{
  const std::size_t n = layer.count();
  if (cache.preActivation.size() != n || cache.normalized.size() != n ||
      cache.padded.empty())
    throw InternalError("layer_backward: forward cache missing or stale");
  if (gradOutput.size() != n)
    throw ShapeError("layer_backward: gradient count does not match layer");

  const Index rows = cache.rows;
  const Index cols = cache.cols;
  const Index k = layer.kernel_size();

  LayerGradients grads;
  grads.params = layer.zeros_like();
  if (needInputGradient)
    grads.input.assign(cache.padded.size(), Pattern::Zero(rows, cols));

  for (std::size_t i = 0; i < n; ++i)
  {
    const auto idx = static_cast<Index>(i);
    const Pattern& gy = gradOutput[i];
    const Pattern& xhat = cache.normalized[i];

    grads.params.bnShift(idx) = gy.sum();
    grads.params.bnScale(idx) = gy.cwiseProduct(xhat).sum();

    const Eigen::ArrayXXd gx = layer.bnScale(idx) * gy.array();
    const double meanGx = gx.mean();
    const double meanGxXhat = (gx * xhat.array()).mean();
    const Eigen::ArrayXXd gRelu =
        cache.invStd(idx) * (gx - meanGx - xhat.array() * meanGxXhat);
    const Pattern gPre =
        (cache.preActivation[i].array() > 0).select(gRelu, 0.0).matrix();

    const std::size_t src = cache.mode == LayerMode::FanOut ? 0 : i;
    grads.params.kernels[i] = correlate2d(cache.padded[src], gPre);

    if (needInputGradient)
    {
      Pattern gPadded = Pattern::Zero(cache.padded[src].rows(),
                                      cache.padded[src].cols());
      for (Index c = 0; c < k; ++c)
        for (Index r = 0; r < k; ++r)
          gPadded.block(r, c, rows, cols) += layer.kernels[i](r, c) * gPre;
      grads.input[src] +=
          reflect_pad_backward(gPadded, rows, cols, cache.padding);
    }
  }
  return grads;
}

// --- branch -----------------------------------------------------------------

PatternStack branch_forward(const BranchInput& input, const Branch& b,
                            double bnEpsilon, BranchCache* cache)
{
  b.validate();
  LayerCache* c1 = cache ? &cache->layer1 : nullptr;
  LayerCache* c2 = cache ? &cache->layer2 : nullptr;

  const PatternStack hidden = std::visit(
      [&](const auto& in) { return layer_forward(in, b.layer1, bnEpsilon, c1); },
      input);
  PatternStack out = layer_forward(hidden, b.layer2, bnEpsilon, c2);

  if (cache)
    cache->preClamp = out.patterns();
  for (auto& p : out)
    p = p.cwiseMax(0.0);
  return out;
}

Branch branch_backward(const BranchCache& cache, const Branch& b,
                       std::span<const Pattern> gradOutput)
{
  if (cache.preClamp.size() != gradOutput.size())
    throw InternalError("branch_backward: forward cache missing or stale");

  std::vector<Pattern> gClamp;
  gClamp.reserve(gradOutput.size());
  for (std::size_t i = 0; i < gradOutput.size(); ++i)
    gClamp.push_back((cache.preClamp[i].array() > 0)
                         .select(gradOutput[i].array(), 0.0)
                         .matrix());

  LayerGradients g2 = layer_backward(cache.layer2, b.layer2, gClamp, true);
  LayerGradients g1 = layer_backward(cache.layer1, b.layer1, g2.input, false);
  return {std::move(g1.params), std::move(g2.params)};
}

// --- loss -------------------------------------------------------------------

std::string to_string(LossNormalization n)
{
  return n == LossNormalization::Deviation ? "deviation" : "object_mean";
}

LossNormalization parse_loss_normalization(const std::string& name)
{
  if (name == "deviation")
    return LossNormalization::Deviation;
  if (name == "object_mean")
    return LossNormalization::ObjectMean;
  throw InvalidArgument("unknown loss normalization '" + name + "'");
}

LossResult loss_forward(const PatternStack& stack, const ObjectImage& obj,
                        LossNormalization norm)
{
  if (!obj.has_both_classes())
    throw InvalidArgument("loss needs an object with both transmitting and "
                          "blocked pixels");

  LossResult r;
  r.buckets = bucket_measure(stack, obj);
  r.g = reconstruct(stack, r.buckets).g;

  const Mask mask = obj.mask();
  const auto objectPixels = static_cast<double>(mask.count());
  const auto backgroundPixels = static_cast<double>(mask.size()) - objectPixels;
  r.objectMean = mask.select(r.g.array(), 0.0).sum() / objectPixels;
  r.backgroundMean = (!mask).select(r.g.array(), 0.0).sum() / backgroundPixels;
  r.normalization = norm;
  r.scale = norm == LossNormalization::Deviation
                ? std::sqrt((r.g.array() - r.g.mean()).square().mean())
                : r.objectMean;
  if (!(std::abs(r.scale) >= 1e-12))
    throw DegenerateLoss(norm == LossNormalization::Deviation
                             ? "reconstruction is spatially constant"
                             : "object-region mean of the reconstruction vanishes");

  r.reference = mask.select(r.objectMean, Eigen::ArrayXXd::Constant(
                                              mask.rows(), mask.cols(),
                                              r.backgroundMean))
                    .matrix();
  r.loss = ((r.g - r.reference) / r.scale).squaredNorm() /
           static_cast<double>(r.g.size());
  return r;
}

std::vector<Pattern> loss_backward(const LossResult& forward,
                                   const PatternStack& stack,
                                   const ObjectImage& obj, double upstream)
{
  const double n = static_cast<double>(stack.size());
  const double pixels = static_cast<double>(forward.g.size());
  Pattern gG = (2.0 * upstream / (pixels * forward.scale * forward.scale)) *
               (forward.g - forward.reference);
  if (forward.normalization == LossNormalization::Deviation)
    gG -= (2.0 * upstream * forward.loss /
           (pixels * forward.scale * forward.scale)) *
          (forward.g.array() - forward.g.mean()).matrix();
  const double meanBucket = forward.buckets.mean();
  const Pattern meanP = mean_pattern(stack);

  // G = <B P> - <B><P> depends on P_j directly and through B_j = sum P_j T.
  std::vector<Pattern> grads;
  grads.reserve(stack.size());
  for (std::size_t j = 0; j < stack.size(); ++j)
  {
    const double bj = forward.buckets(static_cast<Index>(j));
    const double through = gG.cwiseProduct(stack[j] - meanP).sum();
    grads.push_back((gG * (bj - meanBucket) + obj.transmission() * through) /
                    n);
  }
  return grads;
}

Branch backward(const BranchInput& input, const Branch& b,
                const ObjectImage& obj, double bnEpsilon,
                LossNormalization norm, double* loss)
{
  BranchCache cache;
  const PatternStack out = branch_forward(input, b, bnEpsilon, &cache);
  const LossResult lr = loss_forward(out, obj, norm);
  if (loss)
    *loss = lr.loss;
  const auto g = loss_backward(lr, out, obj);
  return branch_backward(cache, b, g);
}

// --- optimizer --------------------------------------------------------------

void sgdm_step(Eigen::Ref<Eigen::VectorXd> params,
               Eigen::Ref<Eigen::VectorXd> velocity,
               const Eigen::Ref<const Eigen::VectorXd>& grad,
               const SgdmParams& hyper)
{
  if (params.size() != velocity.size() || params.size() != grad.size())
    throw ShapeError("sgdm_step: gradient shape does not mirror parameters");
  if (!grad.allFinite())
  {
    Index where = 0;
    for (; where < grad.size(); ++where)
      if (!std::isfinite(grad(where)))
        break;
    throw NumericError("non-finite gradient at parameter " +
                       std::to_string(where) + "; epoch aborted");
  }
  velocity = hyper.momentum * velocity + grad + hyper.weightDecay * params;
  params -= hyper.learningRate * velocity;
}

void sgdm_step(TrainState& state, const Branch& gradients,
               const TrainConfig& cfg)
{
  Eigen::VectorXd params = flatten(state.branch);
  Eigen::VectorXd velocity = flatten(state.velocity);
  sgdm_step(params, velocity, flatten(gradients),
            {cfg.learningRate, cfg.momentum, cfg.weightDecay});
  unflatten(params, state.branch);
  unflatten(velocity, state.velocity);
  ++state.steps;
}

// --- training ---------------------------------------------------------------

namespace
{

PatternStack as_stack(const BranchInput& input)
{
  if (const auto* p = std::get_if<Pattern>(&input))
    return PatternStack({*p});
  return std::get<PatternStack>(input);
}

} // namespace

RoundResult train_round(const BranchInput& input,
                        std::span<const ObjectImage> objects,
                        const TrainConfig& cfg, std::size_t roundIndex,
                        const ProgressFn& progress)
{
  cfg.validate();
  if (objects.empty())
    throw InvalidArgument("training dataset is empty");

  RoundResult result;
  result.input = as_stack(input);
  const Index rows = result.input.rows();
  const Index cols = result.input.cols();
  for (std::size_t i = 0; i < objects.size(); ++i)
  {
    if (objects[i].rows() != rows || objects[i].cols() != cols)
      throw ShapeError("object " + std::to_string(i) +
                       " does not match the pattern grid");
    if (!objects[i].has_both_classes())
      throw InvalidArgument("object " + std::to_string(i) +
                            " lacks transmitting or blocked pixels");
  }

  const std::size_t n =
      pattern_count(cfg.beta, static_cast<std::size_t>(rows * cols));
  if (std::holds_alternative<PatternStack>(input) && result.input.size() != n)
    throw ShapeError("round input holds " +
                     std::to_string(result.input.size()) +
                     " patterns, expected " + std::to_string(n));

  TrainState& state = result.state;
  state.branch = init_branch(n, cfg.kernelSize,
                             derive_seed(cfg.seed, 2 * roundIndex + 1));
  state.velocity = state.branch.zeros_like();
  state.rng = Rng(derive_seed(cfg.seed, 2 * roundIndex + 2));

  std::vector<std::size_t> order(objects.size());
  const auto batch = static_cast<std::size_t>(cfg.batchSize);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch)
  {
    std::iota(order.begin(), order.end(), std::size_t{0});
    state.rng.shuffle(std::span<std::size_t>(order));

    double epochLoss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch)
    {
      const std::size_t stop = std::min(order.size(), start + batch);
      const double weight = 1.0 / static_cast<double>(stop - start);

      BranchCache cache;
      const PatternStack out =
          branch_forward(input, state.branch, cfg.bnEpsilon, &cache);

      std::vector<Pattern> gradOut(n, Pattern::Zero(rows, cols));
      for (std::size_t s = start; s < stop; ++s)
      {
        const ObjectImage& obj = objects[order[s]];
        const LossResult lr = loss_forward(out, obj, cfg.loss);
        const auto g = loss_backward(lr, out, obj, weight);
        for (std::size_t j = 0; j < n; ++j)
          gradOut[j] += g[j];
        epochLoss += lr.loss;
      }

      sgdm_step(state, branch_backward(cache, state.branch, gradOut), cfg);
    }
    epochLoss /= static_cast<double>(objects.size());
    if (!std::isfinite(epochLoss))
      throw NumericError("non-finite loss in epoch " + std::to_string(epoch + 1));
    state.epochLosses.push_back(epochLoss);
    if (progress)
      progress(roundIndex, epoch + 1, epochLoss);
  }

  result.output = branch_forward(input, state.branch, cfg.bnEpsilon);
  return result;
}

PatternStack normalize_stack(const PatternStack& stack)
{
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& p : stack)
  {
    lo = std::min(lo, p.cwiseMax(0.0).minCoeff());
    hi = std::max(hi, p.cwiseMax(0.0).maxCoeff());
  }
  std::vector<Pattern> out;
  out.reserve(stack.size());
  for (const auto& p : stack)
  {
    if (hi > lo)
      out.push_back(((p.cwiseMax(0.0).array() - lo) / (hi - lo)).matrix());
    else
      out.push_back(Pattern::Zero(p.rows(), p.cols()));
  }
  return PatternStack(std::move(out));
}

PipelineResult train_pipeline(const Pattern& initial,
                              std::span<const ObjectImage> objects,
                              const TrainConfig& cfg,
                              const ProgressFn& progress)
{
  cfg.validate();
  PipelineResult result;
  for (int round = 0; round < cfg.rounds; ++round)
  {
    const auto r = static_cast<std::size_t>(round);
    BranchInput input = round == 0
                            ? BranchInput(initial)
                            : BranchInput(result.rounds.back().output);
    result.rounds.push_back(train_round(input, objects, cfg, r, progress));
  }
  result.exported = normalize_stack(result.rounds.back().output);
  return result;
}

} // namespace speckle
