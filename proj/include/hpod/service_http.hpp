#pragma once

// Routes of the prediction service on a cpp-httplib server.

#include <string>

#include <httplib.h>

#include "hpod/service.hpp"

namespace hpod {

inline void send(httplib::Response& res, const ServiceResponse& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

/// GET /health, GET /classes, POST /predict. `service` must outlive `server`.
inline void install_routes(httplib::Server& server, const PredictionService& service) {
  server.Get("/health", [&service](const httplib::Request&, httplib::Response& res) {
    send(res, service.health());
  });
  server.Get("/classes", [&service](const httplib::Request&, httplib::Response& res) {
    send(res, service.classes());
  });
  server.Post("/predict", [&service](const httplib::Request& req, httplib::Response& res) {
    send(res, service.predict(req.body));
  });
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  server.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
  });
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                                  std::exception_ptr) {
    send(res, {500, {{"schema_version", kServiceSchemaVersion}, {"error", "internal error"}}});
  });
}

}  // namespace hpod
