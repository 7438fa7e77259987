#pragma once

#include <map>
#include <string>

#include "json.hpp"
#include "scorelens/service/workbench.hpp"

namespace scorelens::service {

struct HttpRequest {
  std::string method;  // "GET", "POST"
  std::string path;    // without the query string
  std::map<std::string, std::string> query;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  nlohmann::json body;
};

/// Transport-independent dispatch of the service endpoints. Every response
/// body is JSON; failures carry {"error", "detail"}.
///
///   GET  /api/models
///   POST /api/assignments
///   POST /api/score
///   POST /api/perturb
///   GET  /api/jobs/{id}
///   GET  /api/attention/{assignment}/{slot}/{model}?token=&layer=&head=&mode=
///   GET  /api/history?slot=
///   GET  /api/training/scatter?x=&y=
///   POST /api/training/{example_id}/load
///   POST /score                 external-scorer wire protocol
class Router {
 public:
  explicit Router(Workbench& workbench) : workbench_(workbench) {}

  HttpResponse handle(const HttpRequest& request) const;

 private:
  HttpResponse dispatch(const HttpRequest& request) const;

  Workbench& workbench_;
};

/// Splits "a=1&b=x%20y" into decoded pairs.
std::map<std::string, std::string> parse_query(const std::string& query);

}  // namespace scorelens::service
