//! Adapter for an external model served by a child process.
//!
//! Wire protocol, one JSON document per line on the child's stdin/stdout:
//!
//! ```text
//! handshake:  -> {"hello": 1, "m": <n_features>}
//!             <- {"ok": true}
//! request:    -> {"id": <int>, "rows": [[<f64>, ...], ...]}
//! response:   <- {"id": <int>, "proba": [<f64 in [0,1]>, ...]}
//! ```

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use serde::Deserialize;

use crate::error::{DlimeError, Result};

pub struct ExternalModel {
    n_features: usize,
    child: Mutex<ChildProcess>,
}

struct ChildProcess {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
    next_id: u64,
}

#[derive(Deserialize)]
struct HandshakeReply {
    ok: bool,
}

#[derive(Deserialize)]
struct PredictReply {
    id: u64,
    proba: Vec<f64>,
}

impl ExternalModel {
    /// Spawn `command` (split on whitespace) and run the handshake.
    pub fn spawn(command: &str, n_features: usize) -> Result<Self> {
        let parts: Vec<&str> = command.split_whitespace().collect();
        let (program, args) = parts
            .split_first()
            .ok_or_else(|| DlimeError::Usage("empty external model command".into()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| DlimeError::Transport(format!("cannot spawn '{command}': {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        let mut proc = ChildProcess {
            child,
            stdin,
            stdout,
            next_id: 0,
        };

        let hello = serde_json::json!({"hello": 1, "m": n_features});
        let line = proc.round_trip(&hello.to_string()).map_err(|e| {
            DlimeError::Transport(format!("handshake failed: {e}"))
        })?;
        let reply: HandshakeReply = serde_json::from_str(&line)
            .map_err(|e| DlimeError::Transport(format!("bad handshake reply '{line}': {e}")))?;
        if !reply.ok {
            return Err(DlimeError::Transport("model refused handshake".into()));
        }

        Ok(ExternalModel {
            n_features,
            child: Mutex::new(proc),
        })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn predict_proba(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        let mut proc = self.child.lock().expect("external model mutex");
        proc.next_id += 1;
        let id = proc.next_id;
        let request = serde_json::json!({"id": id, "rows": rows});
        let line = proc
            .round_trip(&request.to_string())
            .map_err(|e| DlimeError::Transport(format!("request {id} failed: {e}")))?;
        let reply: PredictReply = serde_json::from_str(&line).map_err(|e| {
            DlimeError::Transport(format!("request {id}: malformed response '{line}': {e}"))
        })?;
        if reply.id != id {
            return Err(DlimeError::Transport(format!(
                "request {id}: response carries id {}",
                reply.id
            )));
        }
        if reply.proba.len() != rows.len() {
            return Err(DlimeError::Transport(format!(
                "request {id}: expected {} probabilities, got {}",
                rows.len(),
                reply.proba.len()
            )));
        }
        if let Some(bad) = reply.proba.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(DlimeError::Transport(format!(
                "request {id}: probability {bad} outside [0,1]"
            )));
        }
        Ok(reply.proba)
    }
}

impl ChildProcess {
    fn round_trip(&mut self, line: &str) -> std::io::Result<String> {
        self.stdin.write_all(line.as_bytes())?;
        self.stdin.write_all(b"\n")?;
        self.stdin.flush()?;
        let mut reply = String::new();
        let n = self.stdout.read_line(&mut reply)?;
        if n == 0 {
            return Err(std::io::Error::new(
                std::io::ErrorKind::UnexpectedEof,
                "model process closed its stdout",
            ));
        }
        Ok(reply.trim_end().to_string())
    }
}

impl Drop for ChildProcess {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
