#pragma once

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>

#include "scorelens/scoring/wire.hpp"

namespace scorelens::scoring {

struct ExternalOptions {
  std::chrono::milliseconds timeout{60'000};
  std::ptrdiff_t max_connections = 4;  // per endpoint
};

/// HTTP client for one external scorer endpoint. One POST {endpoint}/score
/// per pair; at most `max_connections` requests in flight.
class ExternalScorer {
 public:
  ExternalScorer(std::string endpoint, ExternalOptions options = {});

  const std::string& endpoint() const { return endpoint_; }

  /// Throws ExternalError (transport, status) or SchemaError (body).
  ScoreResult score(const ScoreRequest& request) const;

 private:
  std::string endpoint_;
  ExternalOptions options_;
  std::unique_ptr<std::counting_semaphore<>> slots_;
};

ScoreResult external_score(const std::string& endpoint, const ScoreRequest& request, ExternalOptions options = {});

}  // namespace scorelens::scoring
