use std::io::{self, BufRead, BufReader, Read};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use flate2::read::MultiGzDecoder;
use serde::{Deserialize, Serialize};

use super::parse::parse_quad;
use super::term::Quad;

/// Per-chunk parse accounting.
///
/// `quads_yielded + malformed_lines + blank_or_comment_lines == lines_read`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseReport {
    pub lines_read: u64,
    pub quads_yielded: u64,
    pub malformed_lines: u64,
    pub blank_or_comment_lines: u64,
    /// Lines that contained invalid UTF-8 and were decoded lossily.
    pub invalid_utf8_lines: u64,
    /// Statements without a graph label.
    pub triples_without_graph: u64,
    pub malformed_samples: Vec<MalformedSample>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MalformedSample {
    /// 1-based physical line number.
    pub line: u64,
    pub offset: usize,
    pub message: String,
    pub text: String,
}

impl ParseReport {
    pub fn is_balanced(&self) -> bool {
        self.quads_yielded + self.malformed_lines + self.blank_or_comment_lines == self.lines_read
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StreamError {
    #[error("chunk read failed after {bytes_consumed} input bytes: {source}")]
    Read {
        bytes_consumed: u64,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct StreamOptions {
    /// How many malformed lines to keep verbatim in the report.
    pub sample_limit: usize,
}

impl Default for StreamOptions {
    fn default() -> Self {
        StreamOptions { sample_limit: 10 }
    }
}

struct CountingReader<R> {
    inner: R,
    count: Arc<AtomicU64>,
}

impl<R: Read> Read for CountingReader<R> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.count.fetch_add(n as u64, Ordering::Relaxed);
        Ok(n)
    }
}

enum Source<R: Read> {
    Plain(BufReader<CountingReader<R>>),
    Gzip(BufReader<MultiGzDecoder<CountingReader<R>>>),
}

impl<R: Read> Source<R> {
    fn read_line(&mut self, buf: &mut Vec<u8>) -> io::Result<usize> {
        match self {
            Source::Plain(r) => r.read_until(b'\n', buf),
            Source::Gzip(r) => r.read_until(b'\n', buf),
        }
    }
}

/// Sequential, constant-memory quad iterator over one chunk.
///
/// Malformed lines are skipped and recorded in the [`ParseReport`]. A read or
/// decompression failure is yielded once as an error and ends the stream.
pub struct QuadStream<R: Read> {
    source: Source<R>,
    consumed: Arc<AtomicU64>,
    buf: Vec<u8>,
    next_ordinal: u64,
    report: ParseReport,
    options: StreamOptions,
    done: bool,
}

/// Opens a chunk stream; `compressed` selects gzip decoding.
pub fn stream_chunk<R: Read>(source: R, compressed: bool, options: StreamOptions) -> QuadStream<R> {
    let consumed = Arc::new(AtomicU64::new(0));
    let counting = CountingReader {
        inner: source,
        count: Arc::clone(&consumed),
    };
    let source = if compressed {
        Source::Gzip(BufReader::with_capacity(1 << 16, MultiGzDecoder::new(counting)))
    } else {
        Source::Plain(BufReader::with_capacity(1 << 16, counting))
    };
    QuadStream {
        source,
        consumed,
        buf: Vec::with_capacity(512),
        next_ordinal: 0,
        report: ParseReport::default(),
        options,
        done: false,
    }
}

impl<R: Read> QuadStream<R> {
    pub fn report(&self) -> &ParseReport {
        &self.report
    }

    pub fn into_report(self) -> ParseReport {
        self.report
    }

    /// Compressed (on-disk) bytes pulled from the source so far.
    pub fn bytes_consumed(&self) -> u64 {
        self.consumed.load(Ordering::Relaxed)
    }
}

impl<R: Read> Iterator for QuadStream<R> {
    type Item = Result<Quad, StreamError>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            self.buf.clear();
            match self.source.read_line(&mut self.buf) {
                Ok(0) => {
                    self.done = true;
                    return None;
                }
                Ok(_) => {}
                Err(source) => {
                    self.done = true;
                    return Some(Err(StreamError::Read {
                        bytes_consumed: self.bytes_consumed(),
                        source,
                    }));
                }
            }
            self.report.lines_read += 1;
            let mut bytes = &self.buf[..];
            if let [head @ .., b'\n'] = bytes {
                bytes = head;
            }
            if let [head @ .., b'\r'] = bytes {
                bytes = head;
            }
            let text = match std::str::from_utf8(bytes) {
                Ok(s) => std::borrow::Cow::Borrowed(s),
                Err(_) => {
                    self.report.invalid_utf8_lines += 1;
                    String::from_utf8_lossy(bytes)
                }
            };
            let trimmed = text.trim_start_matches([' ', '\t']);
            if trimmed.is_empty() || trimmed.starts_with('#') {
                self.report.blank_or_comment_lines += 1;
                continue;
            }
            match parse_quad(&text) {
                Ok(mut quad) => {
                    quad.ordinal = self.next_ordinal;
                    self.next_ordinal += 1;
                    self.report.quads_yielded += 1;
                    if quad.graph.is_none() {
                        self.report.triples_without_graph += 1;
                    }
                    return Some(Ok(quad));
                }
                Err(err) => {
                    self.report.malformed_lines += 1;
                    if self.report.malformed_samples.len() < self.options.sample_limit {
                        self.report.malformed_samples.push(MalformedSample {
                            line: self.report.lines_read,
                            offset: err.offset,
                            message: err.kind.to_string(),
                            text: text.into_owned(),
                        });
                    }
                }
            }
        }
        None
    }
}
