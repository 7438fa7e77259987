#include "scorelens/scoring/external_scorer.hpp"

#include "httplib.h"
#include "scorelens/error.hpp"

namespace scorelens::scoring {

namespace {

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<>& s_;
};

}  // namespace

ExternalScorer::ExternalScorer(std::string endpoint, ExternalOptions options)
    : endpoint_(std::move(endpoint)),
      options_(options),
      slots_(std::make_unique<std::counting_semaphore<>>(std::max<std::ptrdiff_t>(1, options.max_connections))) {
  while (!endpoint_.empty() && endpoint_.back() == '/') endpoint_.pop_back();
}

ScoreResult ExternalScorer::score(const ScoreRequest& request) const {
  SlotGuard guard(*slots_);

  httplib::Client client(endpoint_);
  if (!client.is_valid()) throw ExternalError(endpoint_, "invalid endpoint URL");
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  const auto body = to_json(request).dump();
  auto res = client.Post("/score", body, "application/json");
  if (!res) {
    const auto err = res.error();
    const bool timeout = err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout;
    throw ExternalError(endpoint_, timeout ? "timeout: " + httplib::to_string(err)
                                           : "unreachable: " + httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300) {
    throw ExternalError(endpoint_, "status " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception&) {
    throw SchemaError("body", "response is not JSON");
  }
  auto result = score_response_from_json(j, request);
  if (!request.want_attention) result.attention.reset();
  return result;
}

ScoreResult external_score(const std::string& endpoint, const ScoreRequest& request, ExternalOptions options) {
  return ExternalScorer(endpoint, options).score(request);
}

}  // namespace scorelens::scoring
