//! Output records. Text mode prints `kind value value ...`; json-lines mode
//! prints one object per record with the same field names.

use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{Map, Value};

use flipdist::convex::Triangulation;
use flipdist::distance::FlipSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    JsonLines,
}

pub struct Record {
    kind: &'static str,
    fields: Vec<(&'static str, Value)>,
    labeled: bool,
}

impl Record {
    pub fn new(kind: &'static str) -> Self {
        Record { kind, fields: Vec::new(), labeled: false }
    }

    pub fn field(mut self, name: &'static str, value: impl Into<Value>) -> Self {
        self.fields.push((name, value.into()));
        self
    }

    /// Print each field as `name value` in text mode.
    pub fn labeled(mut self) -> Self {
        self.labeled = true;
        self
    }
}

pub struct Out {
    format: Format,
    sink: Box<dyn Write>,
}

impl Out {
    pub fn stdout(format: Format) -> Self {
        Out { format, sink: Box::new(io::BufWriter::new(io::stdout().lock())) }
    }

    pub fn emit(&mut self, r: Record) -> io::Result<()> {
        match self.format {
            Format::Text => {
                let mut line = r.kind.to_string();
                for (k, v) in &r.fields {
                    line.push(' ');
                    if r.labeled {
                        line.push_str(k);
                        line.push(' ');
                    }
                    match v {
                        Value::String(s) => line.push_str(s),
                        other => line.push_str(&other.to_string()),
                    }
                }
                writeln!(self.sink, "{line}")
            }
            Format::JsonLines => {
                let mut obj = Map::new();
                obj.insert("kind".into(), Value::from(r.kind));
                for (k, v) in r.fields {
                    obj.insert(k.into(), v);
                }
                writeln!(self.sink, "{}", Value::Object(obj))
            }
        }
    }

    pub fn triangulation(&mut self, t: &Triangulation) -> io::Result<()> {
        self.emit(Record::new("n").field("n", t.n()))?;
        self.diagonals(t)
    }

    fn diagonals(&mut self, t: &Triangulation) -> io::Result<()> {
        for e in t.diagonals() {
            self.emit(Record::new("d").field("a", e.a).field("b", e.b))?;
        }
        Ok(())
    }

    pub fn sequence(&mut self, f: &FlipSequence) -> io::Result<()> {
        self.emit(Record::new("n").field("n", f.start.n()))?;
        self.emit(Record::new("start"))?;
        self.diagonals(&f.start)?;
        for e in &f.steps {
            self.emit(Record::new("flip").field("a", e.a).field("b", e.b))?;
        }
        Ok(())
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.sink.flush()
    }
}
