use std::io::BufReader;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use super::wire::{parse_response, read_response_line, write_frame};
use super::NextWordClassifier;
use crate::error::{Error, Result};
use crate::raster::Canvas;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

const SHUTDOWN_GRACE: Duration = Duration::from_secs(5);

type Reply = Result<Vec<u8>>;

/// Classifier served by an external process over the wire protocol.
///
/// Frames are written by a dedicated thread and replies collected by
/// another, so a stalled child surfaces as a timeout instead of a hang. One
/// request is in flight at a time. After any failure the handle refuses
/// further requests.
pub struct SubprocessClassifier {
    child: Child,
    frames: Option<Sender<Vec<u8>>>,
    replies: Receiver<Reply>,
    writer: Option<JoinHandle<()>>,
    reader: Option<JoinHandle<()>>,
    vocab_size: usize,
    timeout: Duration,
    round_trips: usize,
    broken: bool,
}

impl SubprocessClassifier {
    /// Launch `cmdline`, split with POSIX shell quoting rules.
    pub fn spawn(cmdline: &str, vocab_size: usize, timeout: Duration) -> Result<Self> {
        let argv = shlex::split(cmdline)
            .ok_or_else(|| Error::invalid(format!("cannot parse command line {cmdline:?}")))?;
        let (program, args) = argv
            .split_first()
            .ok_or_else(|| Error::invalid("empty classifier command"))?;
        let mut cmd = Command::new(program);
        cmd.args(args);
        Self::spawn_command(cmd, vocab_size, timeout)
    }

    pub fn spawn_command(mut cmd: Command, vocab_size: usize, timeout: Duration) -> Result<Self> {
        if vocab_size == 0 {
            return Err(Error::invalid("vocabulary size must be positive"));
        }
        let mut child = cmd
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| Error::Transport(format!("cannot launch classifier {cmd:?}: {e}")))?;
        let stdin = child.stdin.take().expect("stdin is piped");
        let stdout = child.stdout.take().expect("stdout is piped");

        let (frame_tx, frame_rx) = mpsc::channel::<Vec<u8>>();
        let (reply_tx, reply_rx) = mpsc::channel::<Reply>();

        let writer_replies = reply_tx.clone();
        let writer = thread::spawn(move || write_loop(stdin, frame_rx, writer_replies));
        let reader = thread::spawn(move || {
            let mut stdout = BufReader::new(stdout);
            loop {
                let reply = match read_response_line(&mut stdout) {
                    Ok(Some(line)) => Ok(line),
                    Ok(None) => Err(Error::Transport("classifier closed its output".into())),
                    Err(e) => Err(e),
                };
                let done = reply.is_err();
                if reply_tx.send(reply).is_err() || done {
                    break;
                }
            }
        });

        Ok(SubprocessClassifier {
            child,
            frames: Some(frame_tx),
            replies: reply_rx,
            writer: Some(writer),
            reader: Some(reader),
            vocab_size,
            timeout,
            round_trips: 0,
            broken: false,
        })
    }

    /// Completed request/response exchanges so far.
    pub fn round_trips(&self) -> usize {
        self.round_trips
    }

    fn exchange(&mut self, canvas: &Canvas) -> Result<usize> {
        if self.broken {
            return Err(Error::Transport(
                "classifier handle is unusable after an earlier failure".into(),
            ));
        }
        let frame = canvas.encode_png()?;
        let frames = self.frames.as_ref().expect("sender lives until drop");
        frames
            .send(frame)
            .map_err(|_| Error::Transport("classifier input is closed".into()))?;
        let line = match self.replies.recv_timeout(self.timeout) {
            Ok(reply) => reply?,
            Err(RecvTimeoutError::Timeout) => return Err(Error::Timeout(self.timeout)),
            Err(RecvTimeoutError::Disconnected) => {
                return Err(Error::Transport("classifier connection lost".into()))
            }
        };
        let index = parse_response(&line)?;
        if index >= self.vocab_size {
            return Err(Error::IndexOutOfRange {
                index,
                size: self.vocab_size,
            });
        }
        self.round_trips += 1;
        Ok(index)
    }
}

fn write_loop(mut stdin: ChildStdin, frames: Receiver<Vec<u8>>, replies: Sender<Reply>) {
    for frame in frames {
        if let Err(e) = write_frame(&mut stdin, &frame) {
            let _ = replies.send(Err(Error::Transport(format!("writing request: {e}"))));
            return;
        }
    }
}

impl NextWordClassifier for SubprocessClassifier {
    fn predict(&mut self, canvas: &Canvas) -> Result<usize> {
        let result = self.exchange(canvas);
        if result.is_err() {
            self.broken = true;
        }
        result
    }
}

impl Drop for SubprocessClassifier {
    fn drop(&mut self) {
        // closing stdin asks the child to shut down
        self.frames.take();
        if let Some(w) = self.writer.take() {
            let _ = w.join();
        }
        let deadline = Instant::now()
            + if self.broken {
                Duration::ZERO
            } else {
                SHUTDOWN_GRACE
            };
        loop {
            match self.child.try_wait() {
                Ok(Some(_)) => break,
                Ok(None) if Instant::now() < deadline => thread::sleep(Duration::from_millis(5)),
                _ => {
                    let _ = self.child.kill();
                    let _ = self.child.wait();
                    break;
                }
            }
        }
        // the reader is left detached: a grandchild may still hold stdout open
        self.reader.take();
    }
}
