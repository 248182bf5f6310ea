//! Optional event-trace log: one tab-separated line per event or transition,
//! `time<TAB>kind<TAB>agent_id`. Times use the shortest round-trip float
//! formatting, so a parsed trace reproduces the exact simulated instants.

use std::fmt::Display;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::Minutes;

/// Destination of the event-trace log.
#[derive(Default)]
pub enum TraceSink {
    /// Tracing disabled (the default); emission is a no-op.
    #[default]
    Null,
    /// In-memory buffer, used by determinism and replay tests.
    Buffer(Vec<u8>),
    File(BufWriter<File>),
}

impl std::fmt::Debug for TraceSink {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TraceSink::Null => write!(f, "TraceSink::Null"),
            TraceSink::Buffer(b) => write!(f, "TraceSink::Buffer({} bytes)", b.len()),
            TraceSink::File(_) => write!(f, "TraceSink::File"),
        }
    }
}

impl TraceSink {
    pub fn buffer() -> Self {
        TraceSink::Buffer(Vec::new())
    }

    pub fn file(path: impl AsRef<Path>) -> std::io::Result<Self> {
        Ok(TraceSink::File(BufWriter::new(File::create(path)?)))
    }

    pub fn is_enabled(&self) -> bool {
        !matches!(self, TraceSink::Null)
    }

    pub(crate) fn emit(&mut self, time: Minutes, kind: &str, agent: impl Display) {
        match self {
            TraceSink::Null => {}
            TraceSink::Buffer(buf) => {
                // Writing to a Vec cannot fail.
                let _ = writeln!(buf, "{time}\t{kind}\t{agent}");
            }
            TraceSink::File(w) => {
                writeln!(w, "{time}\t{kind}\t{agent}").expect("trace write failed");
            }
        }
    }

    /// Returns the buffered bytes, if this sink is a buffer.
    pub fn into_bytes(self) -> Option<Vec<u8>> {
        match self {
            TraceSink::Buffer(buf) => Some(buf),
            _ => None,
        }
    }

    pub fn flush(&mut self) -> std::io::Result<()> {
        match self {
            TraceSink::File(w) => w.flush(),
            _ => Ok(()),
        }
    }
}
