use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tape::{build_tape, Request, RequestSet, Tape};

const HEADER: &str = "ltsp";
const VERSION: &str = "1";

pub fn render_instance(tape: &Tape, requests: &RequestSet) -> String {
    let mut out = String::with_capacity(16 * (tape.num_files() + requests.len()));
    let _ = writeln!(out, "{HEADER} {VERSION}");
    let _ = writeln!(out, "files {}", tape.num_files());
    for f in tape.files() {
        let _ = writeln!(out, "{}", f.size);
    }
    let _ = writeln!(out, "requests {}", requests.len());
    for r in requests.requests() {
        let _ = writeln!(out, "{} {}", r.file, r.release);
    }
    out
}

pub fn write_instance(path: impl AsRef<Path>, tape: &Tape, requests: &RequestSet) -> Result<()> {
    std::fs::write(path, render_instance(tape, requests))?;
    Ok(())
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<(Tape, RequestSet)> {
    parse_instance(&std::fs::read_to_string(path)?)
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn number(line: usize, tok: &str, what: &str) -> Result<u64> {
    if tok.starts_with('-') {
        return Err(parse_err(line, format!("{what} must not be negative: `{tok}`")));
    }
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected {what}, found `{tok}`")))
}

struct Cursor<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let ln = self.pos + 1;
        match self.lines.get(self.pos) {
            Some(l) if !(l.is_empty() && self.pos + 1 == self.lines.len()) => {
                self.pos += 1;
                Ok((ln, l))
            }
            _ => Err(parse_err(ln, format!("unexpected end of file, expected {what}"))),
        }
    }

    fn keyed(&mut self, key: &str) -> Result<u64> {
        let (ln, text) = self.next(&format!("`{key} <count>`"))?;
        match text.split(' ').collect::<Vec<_>>()[..] {
            [k, n] if k == key => number(ln, n, "a count"),
            _ => Err(parse_err(ln, format!("expected `{key} <count>`, found `{text}`"))),
        }
    }
}

pub fn parse_instance(text: &str) -> Result<(Tape, RequestSet)> {
    let mut cur = Cursor {
        lines: text.split('\n').collect(),
        pos: 0,
    };

    let (ln, head) = cur.next("the `ltsp 1` header")?;
    match head.split(' ').collect::<Vec<_>>()[..] {
        [HEADER, VERSION] => {}
        [HEADER, v] => return Err(Error::Version(v.to_string())),
        _ => return Err(parse_err(ln, format!("expected `ltsp 1`, found `{head}`"))),
    }

    let nf = cur.keyed("files")? as usize;
    let mut sizes = Vec::with_capacity(nf.min(1 << 20));
    for _ in 0..nf {
        let (ln, l) = cur.next("a file size")?;
        let size = number(ln, l, "a file size")?;
        if size == 0 {
            return Err(parse_err(ln, "file size must be at least 1"));
        }
        sizes.push(size);
    }
    let tape = build_tape(&sizes)?;

    let nr = cur.keyed("requests")? as usize;
    let mut requests = Vec::with_capacity(nr.min(1 << 24));
    for _ in 0..nr {
        let (ln, l) = cur.next("a request line")?;
        let [f, t] = l.split(' ').collect::<Vec<_>>()[..] else {
            return Err(parse_err(ln, format!("expected `<file> <release>`, found `{l}`")));
        };
        let file = number(ln, f, "a file index")? as usize;
        if file >= nf {
            return Err(parse_err(ln, format!("file index {file} out of range")));
        }
        let release = number(ln, t, "a release time")?;
        requests.push(Request { file, release });
    }
    let rest = &cur.lines[cur.pos..];
    if !(rest.is_empty() || rest == [""]) {
        return Err(parse_err(cur.pos + 1, format!("unexpected trailing line `{}`", rest[0])));
    }
    let requests = RequestSet::new(&tape, requests)?;
    Ok((tape, requests))
}
