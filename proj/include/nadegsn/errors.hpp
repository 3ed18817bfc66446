#pragma once

#include <stdexcept>
#include <string>

namespace nadegsn {

// One code per failure mode named in module contracts. Tests match on the
// code, messages are for humans.
enum class Errc {
  bad_magic,
  truncated,
  too_few_items,
  bad_flip_prob,
  bad_dims,
  shape_mismatch,
  version_mismatch,
  corrupt,
  empty_dataset,
  empty_set,
  bad_noise,
  bad_step,
  bad_config,
  zero_variance,
  too_short,
  too_large,
  no_convergence,
  bad_input,
  not_found,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::bad_magic: return "BadMagic";
    case Errc::truncated: return "Truncated";
    case Errc::too_few_items: return "TooFewItems";
    case Errc::bad_flip_prob: return "BadFlipProb";
    case Errc::bad_dims: return "BadDims";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::version_mismatch: return "VersionMismatch";
    case Errc::corrupt: return "Corrupt";
    case Errc::empty_dataset: return "EmptyDataset";
    case Errc::empty_set: return "EmptySet";
    case Errc::bad_noise: return "BadNoise";
    case Errc::bad_step: return "BadStep";
    case Errc::bad_config: return "BadConfig";
    case Errc::zero_variance: return "ZeroVariance";
    case Errc::too_short: return "TooShort";
    case Errc::too_large: return "TooLarge";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::bad_input: return "BadInput";
    case Errc::not_found: return "NotFound";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace nadegsn
