#include <cctype>

#include "emoscript/behavior.hpp"
#include "emoscript/unicode.hpp"

namespace emoscript {

namespace {

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

// Closing punctuation that stays attached to the sentence it ends.
std::size_t closer_length(std::string_view text, std::size_t pos) {
    if (pos >= text.size()) return 0;
    switch (text[pos]) {
        case ')': case ']': case '}': case '"': case '\'':
            return 1;
        default: break;
    }
    std::size_t next = pos;
    const char32_t cp = unicode::decode(text, next);
    if (cp == 0x201D || cp == 0x2019 || cp == 0x00BB) return next - pos;
    return 0;
}

class Scanner {
public:
    explicit Scanner(std::string_view text) : text_(text) {}

    std::vector<TokenSpan> run() {
        while (pos_ < text_.size()) {
            if (const auto len = unicode::emoji_cluster_length(text_, pos_); len > 0) {
                close_sentence(pos_);
                out_.push_back({Token::emoji(std::string(text_.substr(pos_, len))), pos_, pos_ + len});
                pos_ += len;
                continue;
            }
            const char c = text_[pos_];
            if (unicode::is_ascii_space(c)) {
                ++pos_;
                continue;
            }
            if (!sentence_start_) sentence_start_ = pos_;
            if (is_terminator(c)) {
                scan_terminator_run();
                continue;
            }
            unicode::decode(text_, pos_);
        }
        close_sentence(text_.size());
        return std::move(out_);
    }

private:
    void scan_terminator_run() {
        std::size_t run = 0;
        while (pos_ < text_.size() && is_terminator(text_[pos_])) {
            ++pos_;
            ++run;
        }
        while (const auto len = closer_length(text_, pos_)) pos_ += len;

        if (pos_ >= text_.size() || unicode::is_ascii_space(text_[pos_]) ||
            unicode::emoji_cluster_length(text_, pos_) > 0) {
            close_sentence(pos_);
        } else if (run >= 2 && std::isupper(static_cast<unsigned char>(text_[pos_]))) {
            close_sentence(pos_);
        }
    }

    void close_sentence(std::size_t end) {
        if (!sentence_start_) return;
        const std::size_t begin = *sentence_start_;
        std::size_t stop = end;
        while (stop > begin && unicode::is_ascii_space(text_[stop - 1])) --stop;
        sentence_start_.reset();
        if (stop == begin) return;
        out_.push_back({Token::sentence(normalize_whitespace(text_.substr(begin, stop - begin))), begin, stop});
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::optional<std::size_t> sentence_start_;
    std::vector<TokenSpan> out_;
};

}  // namespace

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (const char c : text) {
        if (unicode::is_ascii_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

std::vector<TokenSpan> tokenize_spans(std::string_view text) { return Scanner(text).run(); }

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    for (auto& span : tokenize_spans(text)) tokens.push_back(std::move(span.token));
    return tokens;
}

}  // namespace emoscript
