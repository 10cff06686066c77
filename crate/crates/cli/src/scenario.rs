//! Line-oriented storage scenario scripts.
//!
//! ```text
//! place example2 M=9 file=data.bin
//! fail 3
//! repair 3
//! reconstruct 0,1,2
//! ```
//!
//! Node indices are zero-based. Paths in `place` resolve against the
//! script's directory. Refused failures and insufficient reconstructions are
//! reported and the script continues; malformed lines abort it.

use std::io::Write;
use std::path::Path;

use frcode::{validate_fr, Error, Reconstruction, StorageSystem};

use crate::args::Options;
use crate::{load_input, write_out, Failure, Outcome};

struct Placed {
    system: StorageSystem,
    original: Vec<u8>,
}

struct Runner<'a> {
    script: &'a Path,
    base: &'a Path,
    opts: &'a Options,
    placed: Option<Placed>,
    mismatches: usize,
}

fn syntax(ctx: &str, line: usize, message: impl Into<String>) -> Failure {
    Failure::core(
        ctx,
        Error::Format {
            line,
            message: message.into(),
        },
    )
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, Error> {
    std::fs::read(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_node(ctx: &str, line: usize, token: &str) -> Result<usize, Failure> {
    token
        .parse()
        .map_err(|_| syntax(ctx, line, format!("`{token}` is not a node index")))
}

pub(crate) fn run_script(script: &Path, opts: &Options, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let shown = script.display().to_string();
    let text = read_bytes(script)
        .and_then(|b| {
            String::from_utf8(b).map_err(|_| Error::Format {
                line: 1,
                message: "script is not UTF-8".into(),
            })
        })
        .map_err(|e| Failure::core(&shown, e))?;
    let mut runner = Runner {
        script,
        base: script.parent().unwrap_or(Path::new(".")),
        opts,
        placed: None,
        mismatches: 0,
    };
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let report = runner.step(i + 1, trimmed, err)?;
        write_out(out, &report)?;
    }
    if runner.mismatches > 0 {
        return Err(Failure::Invalid(format!(
            "{shown}: {} reconstructions did not match the input file",
            runner.mismatches
        )));
    }
    Ok(())
}

impl Runner<'_> {
    fn ctx(&self) -> String {
        self.script.display().to_string()
    }

    fn step(&mut self, line: usize, text: &str, err: &mut dyn Write) -> Result<String, Failure> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let ctx = self.ctx();
        let at = format!("{ctx}:{line}");
        match tokens[..] {
            ["place", input, ref rest @ ..] => self.place(line, input, rest, err),
            ["fail", node] => {
                let node = parse_node(&ctx, line, node)?;
                let sys = self.system(&at)?;
                match sys.fail_node(node) {
                    Ok(()) => Ok(format!("fail {node}: ok\n")),
                    Err(e @ Error::ToleranceExceeded { .. }) => Ok(format!("fail {node}: refused: {e}\n")),
                    Err(e) => Err(Failure::core(at, e)),
                }
            }
            ["repair", node] => {
                let node = parse_node(&ctx, line, node)?;
                let log = self.system(&at)?.repair_node(node).map_err(|e| Failure::core(&at, e))?;
                let mut text: String = log.iter().map(|t| format!("{t}\n")).collect();
                let bytes: usize = log.iter().map(|t| t.bytes).sum();
                text.push_str(&format!("repair {node}: {} packets, {bytes} B transferred\n", log.len()));
                Ok(text)
            }
            ["reconstruct", list] => {
                let nodes = list
                    .split(',')
                    .map(|t| parse_node(&ctx, line, t.trim()))
                    .collect::<Result<Vec<_>, _>>()?;
                self.reconstruct(&at, list, &nodes)
            }
            [cmd, ..] => Err(syntax(
                &ctx,
                line,
                format!("unrecognized command `{cmd}` (expected place, fail, repair or reconstruct with one argument)"),
            )),
            [] => unreachable!("blank lines are skipped"),
        }
    }

    fn system(&mut self, at: &str) -> Result<&mut StorageSystem, Failure> {
        self.placed
            .as_mut()
            .map(|p| &mut p.system)
            .ok_or_else(|| Failure::Invalid(format!("{at}: no file placed yet")))
    }

    fn place(&mut self, line: usize, input: &str, rest: &[&str], err: &mut dyn Write) -> Result<String, Failure> {
        let ctx = self.ctx();
        let at = format!("{ctx}:{line}");
        let mut m = None;
        let mut file = None;
        for token in rest {
            match token.split_once('=') {
                Some(("M", value)) => {
                    m = Some(
                        value
                            .parse::<usize>()
                            .map_err(|_| syntax(&ctx, line, format!("bad file size `{value}`")))?,
                    )
                }
                Some(("file", value)) => file = Some(value),
                _ => return Err(syntax(&ctx, line, format!("unexpected `{token}`"))),
            }
        }
        let (Some(m), Some(file)) = (m, file) else {
            return Err(syntax(&ctx, line, "place needs M=<int> and file=<path>"));
        };

        let loaded = load_input(input, Some(self.base), self.opts, err)
            .map_err(|f| f.within(&at))?;
        let code = validate_fr(&loaded.structure).map_err(|e| Failure::core(&at, e.into()))?;
        let original = read_bytes(&self.base.join(file)).map_err(|e| Failure::core(&at, e))?;
        if m == 0 {
            return Err(Failure::core(&at, Error::Argument("file size M must be positive".into())));
        }
        let mut padded = original.clone();
        padded.resize(original.len().div_ceil(m) * m, 0);
        let system = StorageSystem::encode_and_place(&code, &padded, m).map_err(|e| Failure::core(&at, e))?;
        let text = format!(
            "place {}: {} M={m}, {} B padded to {} B, {} packets of {} B\n",
            loaded.label,
            code.params(),
            original.len(),
            padded.len(),
            code.params().v,
            system.packet_len()
        );
        self.placed = Some(Placed { system, original });
        Ok(text)
    }

    fn reconstruct(&mut self, at: &str, list: &str, nodes: &[usize]) -> Result<String, Failure> {
        self.system(at)?;
        let placed = self.placed.as_ref().expect("checked above");
        match placed.system.reconstruct_from(nodes).map_err(|e| Failure::core(at, e))? {
            Reconstruction::Recovered(mut bytes) => {
                bytes.truncate(placed.original.len());
                if bytes == placed.original {
                    Ok(format!("reconstruct {list}: recovered {} B, matches\n", bytes.len()))
                } else {
                    self.mismatches += 1;
                    Ok(format!("reconstruct {list}: recovered {} B, MISMATCH\n", bytes.len()))
                }
            }
            Reconstruction::Insufficient { distinct, needed } => Ok(format!(
                "reconstruct {list}: insufficient: {distinct} distinct packets, need {needed}\n"
            )),
        }
    }
}
