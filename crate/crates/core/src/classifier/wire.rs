//! Classifier wire protocol over a child process's standard streams.
//!
//! Request: 4-byte big-endian length `L`, then `L` bytes of a PNG-encoded
//! 224×224 RGB canvas. Response: the class index in ASCII decimal followed
//! by a single `\n`. Closing the request stream ends the session.

use std::io::{self, BufRead, ErrorKind, Read, Write};

use crate::error::{Error, Result};
use crate::raster::Raster;

use super::MemorizingModel;

/// Upper bound on a request body; canvases encode to well under this.
pub const MAX_FRAME_LEN: u32 = 64 << 20;

pub fn write_frame(w: &mut impl Write, payload: &[u8]) -> io::Result<()> {
    let len = u32::try_from(payload.len())
        .map_err(|_| io::Error::new(ErrorKind::InvalidInput, "frame too large"))?;
    w.write_all(&len.to_be_bytes())?;
    w.write_all(payload)?;
    w.flush()
}

/// Next request body, or `None` when the stream ends cleanly between frames.
pub fn read_frame(r: &mut impl Read) -> Result<Option<Vec<u8>>> {
    let mut header = [0u8; 4];
    let mut filled = 0;
    while filled < header.len() {
        match r.read(&mut header[filled..]) {
            Ok(0) if filled == 0 => return Ok(None),
            Ok(0) => {
                return Err(Error::Protocol(format!(
                    "stream ended inside a frame header ({filled}/4 bytes)"
                )))
            }
            Ok(n) => filled += n,
            Err(e) if e.kind() == ErrorKind::Interrupted => {}
            Err(e) => return Err(Error::Transport(e.to_string())),
        }
    }
    let len = u32::from_be_bytes(header);
    if len > MAX_FRAME_LEN {
        return Err(Error::Protocol(format!(
            "frame length {len} exceeds {MAX_FRAME_LEN}"
        )));
    }
    let mut body = vec![0u8; len as usize];
    r.read_exact(&mut body).map_err(|e| match e.kind() {
        ErrorKind::UnexpectedEof => {
            Error::Protocol(format!("stream ended inside a {len}-byte frame"))
        }
        _ => Error::Transport(e.to_string()),
    })?;
    Ok(Some(body))
}

pub fn write_response(w: &mut impl Write, index: usize) -> io::Result<()> {
    writeln!(w, "{index}")?;
    w.flush()
}

/// Parse one response line, including its trailing `\n`.
pub fn parse_response(line: &[u8]) -> Result<usize> {
    let Some(digits) = line.strip_suffix(b"\n") else {
        return Err(Error::Protocol(
            "response is not terminated by a line feed".into(),
        ));
    };
    if digits.is_empty() || !digits.iter().all(u8::is_ascii_digit) {
        return Err(Error::Protocol(format!(
            "response {:?} is not a decimal class index",
            String::from_utf8_lossy(digits)
        )));
    }
    std::str::from_utf8(digits)
        .expect("ascii digits")
        .parse()
        .map_err(|_| Error::Protocol("class index overflows".into()))
}

/// Read one response line. `None` means the peer closed the stream.
pub fn read_response_line(r: &mut impl BufRead) -> Result<Option<Vec<u8>>> {
    let mut line = Vec::new();
    let n = r
        .read_until(b'\n', &mut line)
        .map_err(|e| Error::Transport(e.to_string()))?;
    if n == 0 {
        return Ok(None);
    }
    Ok(Some(line))
}

/// Answer requests with `model` until the request stream closes. Returns the
/// number of requests served.
pub fn serve(
    model: &MemorizingModel,
    input: &mut impl Read,
    output: &mut impl Write,
) -> Result<usize> {
    let mut served = 0;
    while let Some(frame) = read_frame(input)? {
        let canvas = Raster::decode(&frame)
            .map_err(|e| Error::Protocol(format!("request {served}: {e}")))?;
        let index = model
            .classify(&canvas)
            .map_err(|e| Error::Protocol(format!("request {served}: {e}")))?;
        write_response(output, index).map_err(|e| Error::Transport(e.to_string()))?;
        served += 1;
    }
    Ok(served)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Rgb;
    use std::io::Cursor;

    #[test]
    fn frame_layout_is_big_endian_length_then_body() {
        let mut buf = Vec::new();
        write_frame(&mut buf, b"abc").unwrap();
        assert_eq!(buf, [0, 0, 0, 3, b'a', b'b', b'c']);
        let mut r = Cursor::new(buf);
        assert_eq!(read_frame(&mut r).unwrap().unwrap(), b"abc");
        assert_eq!(read_frame(&mut r).unwrap(), None);
    }

    #[test]
    fn truncated_frames_are_protocol_errors() {
        for bytes in [&[0u8, 0][..], &[0, 0, 0, 5, 1, 2][..]] {
            assert!(matches!(
                read_frame(&mut Cursor::new(bytes)),
                Err(Error::Protocol(_))
            ));
        }
        let huge = (MAX_FRAME_LEN + 1).to_be_bytes();
        assert!(matches!(
            read_frame(&mut Cursor::new(huge)),
            Err(Error::Protocol(_))
        ));
    }

    #[test]
    fn responses() {
        let mut buf = Vec::new();
        write_response(&mut buf, 11570).unwrap();
        assert_eq!(buf, b"11570\n");
        assert_eq!(parse_response(b"11570\n").unwrap(), 11570);
        assert_eq!(parse_response(b"0\n").unwrap(), 0);
        for bad in [
            &b"banana\n"[..],
            b"12",
            b"\n",
            b"-1\n",
            b"3 \n",
            b"3\r\n",
            b"99999999999999999999999\n",
        ] {
            assert!(
                matches!(parse_response(bad), Err(Error::Protocol(_))),
                "{bad:?}"
            );
        }
    }

    #[test]
    fn serve_answers_each_frame() {
        let white = Raster::filled(224, 224, Rgb::WHITE).unwrap();
        let black = Raster::filled(224, 224, Rgb::BLACK).unwrap();
        let model = MemorizingModel::train(&[(white.clone(), 7), (black.clone(), 3)]).unwrap();
        let mut input = Vec::new();
        for c in [&white, &black, &white] {
            write_frame(&mut input, &c.encode_png().unwrap()).unwrap();
        }
        let mut out = Vec::new();
        assert_eq!(
            serve(&model, &mut Cursor::new(input.clone()), &mut out).unwrap(),
            3
        );
        assert_eq!(out, b"7\n3\n7\n");

        input.truncate(input.len() - 10);
        let err = serve(&model, &mut Cursor::new(input), &mut Vec::new()).unwrap_err();
        assert!(matches!(err, Error::Protocol(_)));
    }
}
