#pragma once

#include <stdexcept>
#include <string>

namespace nmspdc {

// Thrown when a finite Fock-space cutoff provably drops more probability
// mass than the caller's budget allows. `deficit` is the measured loss.
class truncation_error : public std::runtime_error {
public:
  truncation_error(const std::string& what, double deficit)
      : std::runtime_error(what), deficit_(deficit) {}

  double deficit() const noexcept { return deficit_; }

private:
  double deficit_;
};

}  // namespace nmspdc
