#pragma once

#include <functional>
#include <optional>
#include <string>

#include "lurbench/geo.hpp"
#include "lurbench/scene.hpp"

namespace lur {

// Source of real slippy-map tiles; lets users substitute rendered map
// imagery for the synthetic renderer.
class TileProvider {
 public:
  virtual ~TileProvider() = default;
  virtual TileImage fetch(const TileIndex& index) = 0;
};

// Reads <root>/z/x/y.png.
class LocalTileProvider : public TileProvider {
 public:
  explicit LocalTileProvider(std::string root);
  TileImage fetch(const TileIndex& index) override;

 private:
  std::string root_;
};

// Returns the response body, or nullopt on transport failure. Injectable
// for tests.
using HttpTransport =
    std::function<std::optional<std::string>(const std::string& url)>;

struct HttpProviderOptions {
  std::string url_template;  // e.g. "http://host/tiles/{z}/{x}/{y}.png"
  std::string cache_dir;     // "" disables caching
  int max_attempts = 3;
  int backoff_initial_ms = 100;  // doubled per retry
  int min_interval_ms = 0;       // rate limit between network calls
};

class HttpTileProvider : public TileProvider {
 public:
  // Default transport performs a real HTTP(S) GET.
  explicit HttpTileProvider(HttpProviderOptions options,
                            HttpTransport transport = {});
  TileImage fetch(const TileIndex& index) override;

  int network_calls() const { return network_calls_; }
  int cache_hits() const { return cache_hits_; }

 private:
  std::string url_for(const TileIndex& index) const;
  std::string cache_path(const TileIndex& index) const;

  HttpProviderOptions options_;
  HttpTransport transport_;
  int network_calls_ = 0;
  int cache_hits_ = 0;
  long last_request_ms_ = -1;
};

}  // namespace lur
