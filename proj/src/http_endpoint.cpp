#include "http_endpoint.hpp"

#include "emoscript/error.hpp"

namespace emoscript::detail {

HttpEndpoint parse_endpoint(std::string_view url, std::string_view default_path) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) {
        throw Error(ErrorCode::ConfigError, "endpoint is not a URL: " + std::string(url));
    }
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw Error(ErrorCode::ConfigError, "unsupported endpoint scheme: " + std::string(scheme));
    }
    const auto path_start = url.find('/', scheme_end + 3);
    HttpEndpoint out;
    if (path_start == std::string_view::npos) {
        out.origin = std::string(url);
        out.path = std::string(default_path);
    } else {
        out.origin = std::string(url.substr(0, path_start));
        out.path = std::string(url.substr(path_start));
    }
    if (out.origin.size() <= scheme_end + 3) {
        throw Error(ErrorCode::ConfigError, "endpoint has no host: " + std::string(url));
    }
    return out;
}

}  // namespace emoscript::detail
