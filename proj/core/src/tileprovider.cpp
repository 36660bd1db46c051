#include "lurbench/tileprovider.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "lurbench/errors.hpp"
#include "lurbench/pngio.hpp"

namespace lur {

namespace fs = std::filesystem;

namespace {

long now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string replace_all(std::string s, const std::string& from,
                        const std::string& to) {
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::optional<std::string> default_transport(const std::string& url) {
  // Split scheme://host[:port] from the path.
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) return std::nullopt;
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string origin =
      path_start == std::string::npos ? url : url.substr(0, path_start);
  const std::string path =
      path_start == std::string::npos ? "/" : url.substr(path_start);
  httplib::Client client(origin);
  client.set_connection_timeout(10);
  client.set_read_timeout(30);
  auto res = client.Get(path);
  if (!res || res->status != 200) return std::nullopt;
  return res->body;
}

}  // namespace

LocalTileProvider::LocalTileProvider(std::string root)
    : root_(std::move(root)) {}

TileImage LocalTileProvider::fetch(const TileIndex& index) {
  const std::string path = root_ + "/" + std::to_string(index.z) + "/" +
                           std::to_string(index.x) + "/" +
                           std::to_string(index.y) + ".png";
  if (!fs::exists(path)) throw DataError("tile not found: " + path);
  return read_png(path, ImageSemantics::map);
}

HttpTileProvider::HttpTileProvider(HttpProviderOptions options,
                                   HttpTransport transport)
    : options_(std::move(options)), transport_(std::move(transport)) {
  if (options_.url_template.empty())
    throw ConfigError("http tile provider needs a url template");
  if (!transport_) transport_ = default_transport;
}

std::string HttpTileProvider::url_for(const TileIndex& index) const {
  std::string url = options_.url_template;
  url = replace_all(url, "{z}", std::to_string(index.z));
  url = replace_all(url, "{x}", std::to_string(index.x));
  url = replace_all(url, "{y}", std::to_string(index.y));
  return url;
}

std::string HttpTileProvider::cache_path(const TileIndex& index) const {
  return options_.cache_dir + "/" + std::to_string(index.z) + "/" +
         std::to_string(index.x) + "/" + std::to_string(index.y) + ".png";
}

TileImage HttpTileProvider::fetch(const TileIndex& index) {
  if (!options_.cache_dir.empty()) {
    const std::string cached = cache_path(index);
    if (fs::exists(cached)) {
      ++cache_hits_;
      return read_png(cached, ImageSemantics::map);
    }
  }

  const std::string url = url_for(index);
  std::optional<std::string> body;
  int backoff = options_.backoff_initial_ms;
  for (int attempt = 0; attempt < options_.max_attempts; ++attempt) {
    if (options_.min_interval_ms > 0 && last_request_ms_ >= 0) {
      const long wait = last_request_ms_ + options_.min_interval_ms - now_ms();
      if (wait > 0) std::this_thread::sleep_for(std::chrono::milliseconds(wait));
    }
    last_request_ms_ = now_ms();
    ++network_calls_;
    body = transport_(url);
    if (body) break;
    if (attempt + 1 < options_.max_attempts) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
  }
  if (!body) {
    throw DataError("tile fetch failed after " +
                    std::to_string(options_.max_attempts) + " attempts: " +
                    url);
  }

  if (!options_.cache_dir.empty()) {
    const std::string cached = cache_path(index);
    fs::create_directories(fs::path(cached).parent_path());
    const std::string tmp = cached + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      out.write(body->data(), static_cast<std::streamsize>(body->size()));
      if (!out) throw DataError("cache write failed: " + tmp);
    }
    fs::rename(tmp, cached);
    return read_png(cached, ImageSemantics::map);
  }

  // No cache: decode from a temporary file.
  const std::string tmp =
      (fs::temp_directory_path() / "lurbench_tile.png").string();
  {
    std::ofstream out(tmp, std::ios::binary);
    out.write(body->data(), static_cast<std::streamsize>(body->size()));
  }
  TileImage img = read_png(tmp, ImageSemantics::map);
  fs::remove(tmp);
  return img;
}

}  // namespace lur
