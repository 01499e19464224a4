//! Line-oriented interactive shell.
//!
//! Statements end with `;` and may span lines. Lines starting with `\`
//! are shell commands; `\help` lists them.

use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use sigmadb::exec::{effectiveness_report, StatementOutcome};
use sigmadb::plan::LogicalPlan;
use sigmadb::qa::{start_session, Next, Session};
use sigmadb::{Catalog, RelationResult, ResultStatus};

use crate::config::{EngineConfig, OutputFormat};
use crate::error::ServiceError;
use crate::persist::{catalog_statements, load_catalog, save_catalog};
use crate::render::{outcome_message, render};
use crate::script::{explain, run_script};

const HELP: &str = "\
Statements end with ';'. Commands:
  \\q                        quit
  \\d                        list relations
  \\d NAME                   show a relation's definition
  \\explain SELECT ...       show the optimized plan
  \\probe NAME               effectiveness of each grounded attribute subset
  \\format table|csv|json    set the result format
  \\save [PATH]              save the catalog
  \\load PATH                replace the catalog with a saved one
  \\qa start NAME            start a question session over a relation
  \\qa answer ATTR VALUE     answer the current question
  \\qa undo                  take back the last answer
  \\qa show                  show the session state
  \\qa stop                  end the session
";

pub struct Repl {
    catalog: Catalog,
    config: EngineConfig,
    session: Option<Session>,
}

/// What one input produced.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct Reply {
    pub output: String,
    pub quit: bool,
}

impl Reply {
    fn text(output: impl Into<String>) -> Self {
        Reply {
            output: output.into(),
            quit: false,
        }
    }
}

impl Repl {
    pub fn new(catalog: Catalog, config: EngineConfig) -> Self {
        Repl {
            catalog,
            config,
            session: None,
        }
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    /// Reads inputs until end of file or `\q`.
    pub fn run(&mut self, input: impl BufRead, mut output: impl Write, prompt: bool) -> io::Result<()> {
        let mut pending = String::new();
        let mut lines = input.lines();
        loop {
            if prompt {
                write!(output, "{}", if pending.is_empty() { "sigmadb> " } else { "      -> " })?;
                output.flush()?;
            }
            let Some(line) = lines.next().transpose()? else {
                break;
            };
            if pending.is_empty() && line.trim_start().starts_with('\\') {
                let reply = self.command(line.trim());
                output.write_all(reply.output.as_bytes())?;
                if reply.quit {
                    return Ok(());
                }
                continue;
            }
            pending.push_str(&line);
            pending.push('\n');
            if statement_complete(&pending) {
                let reply = self.statements(&std::mem::take(&mut pending));
                output.write_all(reply.output.as_bytes())?;
            }
        }
        if !pending.trim().is_empty() {
            let reply = self.statements(&pending);
            output.write_all(reply.output.as_bytes())?;
        }
        Ok(())
    }

    /// Runs one or more `;`-terminated statements.
    pub fn statements(&mut self, text: &str) -> Reply {
        match run_script(&self.catalog, text, &self.config.budget) {
            Ok(out) => {
                let mut s = String::new();
                for e in &out.executed {
                    match &e.outcome {
                        StatementOutcome::Rows(r) => s.push_str(&render(r, self.config.format)),
                        other => s.push_str(&(outcome_message(other).unwrap_or_default() + "\n")),
                    }
                }
                if out.changed() {
                    self.catalog = out.catalog;
                    if let Err(e) = self.autosave() {
                        s.push_str(&format!("error: {e}\n"));
                    }
                }
                Reply::text(s)
            }
            Err(e) => Reply::text(format!("error: {e}\n")),
        }
    }

    fn autosave(&self) -> Result<(), ServiceError> {
        match &self.config.catalog_path {
            Some(p) => save_catalog(&self.catalog, p),
            None => Ok(()),
        }
    }

    /// Runs one backslash command.
    pub fn command(&mut self, line: &str) -> Reply {
        let mut words = line.split_whitespace();
        let name = words.next().unwrap_or("");
        let args: Vec<&str> = words.collect();
        let result = match (name, args.as_slice()) {
            ("\\q" | "\\quit", _) => {
                return Reply {
                    output: String::new(),
                    quit: true,
                }
            }
            ("\\h" | "\\help" | "\\?", _) => Ok(HELP.to_string()),
            ("\\d", []) => Ok(self.list()),
            ("\\d", [rel]) => self.describe(rel),
            ("\\explain", _) => {
                let sql = line.trim_start_matches("\\explain").trim();
                explain(&self.catalog, sql).map_err(|e| e.to_string())
            }
            ("\\probe", [rel]) => self.probe(rel),
            ("\\format", [f]) => f.parse::<OutputFormat>().map_err(|e| e.to_string()).map(|f| {
                self.config.format = f;
                format!("format is {f}\n")
            }),
            ("\\save", []) => match self.config.catalog_path.clone() {
                Some(p) => self.save(&p),
                None => Err("no catalog path; use \\save PATH".into()),
            },
            ("\\save", [p]) => self.save(Path::new(p)),
            ("\\load", [p]) => load_catalog(Path::new(p)).map_err(|e| e.to_string()).map(|c| {
                self.catalog = c;
                self.config.catalog_path = Some(PathBuf::from(p));
                format!("loaded {} entries from {p}\n", self.catalog.len())
            }),
            ("\\qa", args) => self.qa(args),
            _ => Err(format!("unknown command {line}; try \\help")),
        };
        Reply::text(result.unwrap_or_else(|e| format!("error: {}\n", e.trim_end())))
    }

    fn save(&self, path: &Path) -> Result<String, String> {
        save_catalog(&self.catalog, path)
            .map(|_| format!("saved to {}\n", path.display()))
            .map_err(|e| e.to_string())
    }

    fn list(&self) -> String {
        let mut s = String::new();
        for (name, def) in self.catalog.relations() {
            s.push_str(&format!("{name} ({})\n", def.kind().as_str()));
        }
        if s.is_empty() {
            s.push_str("no relations\n");
        }
        s
    }

    fn describe(&self, name: &str) -> Result<String, String> {
        catalog_statements(&self.catalog)
            .iter()
            .find(|s| {
                matches!(s,
                    sigmadb::lang::ast::Statement::CreateTable { name: n, .. }
                    | sigmadb::lang::ast::Statement::CreateView { name: n, .. }
                    | sigmadb::lang::ast::Statement::CreateEnum { name: n, .. } if n == name)
            })
            .map(|s| sigmadb::lang::render_statement(s) + "\n")
            .ok_or_else(|| format!("no relation or type {name}"))
    }

    fn probe(&self, name: &str) -> Result<String, String> {
        let q = format!("SELECT * FROM {};", sigmadb::lang::ident(name));
        let plan = sigmadb::lang::parse_statement(&q)
            .map_err(sigmadb::Error::from)
            .and_then(|s| match s {
                sigmadb::lang::ast::Statement::Select(q) => {
                    sigmadb::plan::optimize(&sigmadb::plan::lower_query(&q, &self.catalog)?)
                }
                _ => unreachable!("built from a SELECT"),
            })
            .map_err(|e| e.to_string())?;
        let LogicalPlan::CompleteScan(scan) = plan else {
            return Err(format!("{name} is not a complete relation"));
        };
        let mut s = String::new();
        for (grounded, e) in effectiveness_report(&scan, &self.config.budget) {
            let set = if grounded.is_empty() {
                "(none)".to_string()
            } else {
                grounded.join(", ")
            };
            s.push_str(&format!("{:<8} {set}\n", e.as_str()));
        }
        Ok(s)
    }

    fn qa(&mut self, args: &[&str]) -> Result<String, String> {
        match args {
            ["start", rel] => {
                let s = start_session(&self.catalog, rel, &self.config.budget).map_err(|e| e.to_string())?;
                self.session = Some(s);
            }
            ["answer", attr, value] => self
                .session
                .as_mut()
                .ok_or("no session; use \\qa start NAME")?
                .answer_text(attr, value)
                .map_err(|e| e.to_string())?,
            ["undo"] => self
                .session
                .as_mut()
                .ok_or("no session; use \\qa start NAME")?
                .undo()
                .map_err(|e| e.to_string())?,
            ["show"] => {}
            ["stop"] => {
                return self
                    .session
                    .take()
                    .map(|_| "session ended\n".to_string())
                    .ok_or_else(|| "no session".into())
            }
            _ => return Err("usage: \\qa start NAME | answer ATTR VALUE | undo | show | stop".into()),
        }
        let s = self.session.as_ref().ok_or("no session; use \\qa start NAME")?;
        Ok(describe_session(s, self.config.format))
    }
}

/// A statement is complete once the text, outside quotes and comments,
/// ends with `;`.
fn statement_complete(text: &str) -> bool {
    let mut last = None;
    let mut chars = text.chars().peekable();
    let mut quote: Option<char> = None;
    while let Some(c) = chars.next() {
        match (quote, c) {
            (Some(q), c) if c == q => quote = None,
            (Some(_), _) => {}
            (None, '\'' | '"') => {
                quote = Some(c);
                last = Some(c);
            }
            (None, '-') if chars.peek() == Some(&'-') => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            (None, c) if c.is_whitespace() => {}
            (None, c) => last = Some(c),
        }
    }
    quote.is_none() && last == Some(';')
}

fn describe_session(s: &Session, format: OutputFormat) -> String {
    let n = s.remaining().len();
    let mut out = format!("{n} of {} alternatives remain\n", s.full_extension().len());
    for (attr, v) in s.determined() {
        out.push_str(&format!("  {attr} = {v} (determined)\n"));
    }
    match s.next_question() {
        Next::Question { attribute, options } => {
            out.push_str(&format!("{attribute}?\n"));
            for o in options {
                out.push_str(&format!("  {}  ({} remain)\n", o.value, o.would_remain));
            }
        }
        Next::Done { remaining } => {
            let result = RelationResult {
                heading: s.heading().clone(),
                tuples: remaining.into_iter().collect(),
                status: ResultStatus::Complete,
            };
            out.push_str(&render(&result, format));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::statement_complete;

    #[test]
    fn statement_ends() {
        assert!(statement_complete("SELECT * FROM t;"));
        assert!(statement_complete("SELECT * FROM t; -- done\n"));
        assert!(!statement_complete("SELECT * FROM t WHERE x = ';'"));
        assert!(!statement_complete("SELECT * FROM t -- ;\n"));
        assert!(statement_complete("INSERT INTO t VALUES ('a;b');"));
    }
}
