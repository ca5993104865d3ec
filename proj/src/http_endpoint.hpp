#pragma once

#include <string>
#include <string_view>

namespace emoscript::detail {

struct HttpEndpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;    // starts with '/'
};

// Splits "http://host:port/path" into origin and path. Missing path becomes
// `default_path`. Throws ConfigError for anything that is not http(s).
HttpEndpoint parse_endpoint(std::string_view url, std::string_view default_path);

}  // namespace emoscript::detail
