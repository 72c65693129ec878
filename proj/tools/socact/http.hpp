#ifndef SOCACT_TOOLS_HTTP_HPP
#define SOCACT_TOOLS_HTTP_HPP

#include <string>

#include "httplib.h"
#include "service.hpp"

namespace socact::service {

/// Registers the read-only GET endpoints of `store` on `server`.
inline void mount(httplib::Server& server, const ArtifactStore& store) {
  for (const char* path : {"/v1/windows", "/v1/clusters", "/v1/series", "/v1/shift", "/v1/counties"}) {
    server.Get(path, [&store, path](const httplib::Request& req, httplib::Response& res) {
      Params params;
      for (const auto& [k, v] : req.params) params.emplace(k, v);
      const Response r = store.handle(path, params);
      res.status = r.status;
      res.set_content(r.body, "application/json");
    });
  }
  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const Response r = error_response(res.status, res.status == 404 ? "unknown-endpoint" : "http-error", req.path);
    res.set_content(r.body, "application/json");
  });
}

}  // namespace socact::service

#endif  // SOCACT_TOOLS_HTTP_HPP
