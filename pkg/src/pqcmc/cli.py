"""Implicit certificates over McEliece-style keys, from the command line.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 data error.
Failures print a single ``error: <kind>: <reason>`` line on stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import secrets
import sys
from pathlib import Path

import numpy as np

from . import certs, ecqv, files, gf2, mceliece, protocol, rand_gen

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, kind: str, message: str, code: int = EXIT_DATA):
        super().__init__(message)
        self.kind, self.code = kind, code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        sys.stderr.write(f"error: usage: {message}\n")
        sys.exit(EXIT_USAGE)


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError(f"{text} is not a 64-bit unsigned integer")
    return value


def _hex(text: str) -> bytes:
    try:
        return bytes.fromhex(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not hex") from None


def _params(name: str) -> mceliece.ParameterSet:
    try:
        return mceliece.get_params(name)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if any(n < 1 for n in sizes):
        raise argparse.ArgumentTypeError("sizes must be positive")
    return sizes


def _seed(args, name: str = "seed") -> int:
    value = getattr(args, name)
    if value is not None:
        return value
    if getattr(args, "entropy", None) == "os":
        return secrets.randbits(64)
    raise CliError("usage", f"--{name.replace('_', '-')} is required", EXIT_USAGE)


def _read(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError("io", f"cannot read {path}: {exc.strerror}") from exc


def _write(path, data: bytes) -> None:
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise CliError("io", f"cannot write {path}: {exc.strerror}") from exc


def _load_key(path):
    data = _read(path)
    if data[:4] == files.EXPANDED_MAGIC:
        return files.decode_expanded(data)
    return files.decode_private(data)


def _load_cert_bytes(path) -> bytes:
    """Certificate octets from a PQCC file or an issuance-response file."""
    data = _read(path)
    if data[:4] == files.RESPONSE_MAGIC:
        return files.decode_response(data).cert_bytes
    certs.decode_cert(data)
    return data


def _message_bits(data: bytes, width: int) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(data, np.uint8))
    if len(data) > (width + 7) // 8 or bits[width:].any():
        raise CliError("usage", f"message has more than {width} bits", EXIT_USAGE)
    out = np.zeros(width, np.uint8)
    out[: min(len(bits), width)] = bits[:width]
    return out


# --- subcommands --------------------------------------------------------


def cmd_keygen(args) -> int:
    key = mceliece.keygen(args.params, _seed(args))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write(out / "private.pqck", files.encode_private(key))
    _write(out / "public.pqcp", files.encode_public(key.params, key.public_l))
    _write(out / "root.pqcc", protocol.root_cert(key, args.info))
    return EXIT_OK


def cmd_ca_cert(args) -> int:
    key = files.decode_private(_read(args.ca_key))
    _write(args.out, protocol.root_cert(key, args.info))
    return EXIT_OK


def cmd_ee_request(args) -> int:
    _, public = files.decode_public(_read(args.ee_pub))
    _write(args.out, files.encode_request(protocol.IssuanceRequest(public, args.info)))
    return EXIT_OK


def cmd_ca_issue(args) -> int:
    key = files.decode_private(_read(args.ca_key))
    ca_cert = _read(args.ca_cert) if args.ca_cert else protocol.root_cert(key)
    if args.request:
        req = files.decode_request(_read(args.request))
    elif args.ee_pub:
        _, public = files.decode_public(_read(args.ee_pub))
        req = protocol.IssuanceRequest(public, args.info)
    else:
        raise CliError("usage", "one of --ee-pub or --request is required", EXIT_USAGE)
    resp = protocol.ca_issue(protocol.CaContext(key, ca_cert), req, _seed(args, "seed_r"))
    _write(args.out, files.encode_response(resp))
    return EXIT_OK


def cmd_ee_expand(args) -> int:
    key = files.decode_private(_read(args.ee_key))
    resp = files.decode_response(_read(args.response))
    _, ca_public = files.decode_public(_read(args.ca_pub))
    expanded = protocol.ee_expand(key, resp, _read(args.ca_cert), ca_public)
    _write(args.out, files.encode_expanded(expanded))
    if args.cert_out:
        _write(args.cert_out, resp.cert_bytes)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    cert_bytes = _load_cert_bytes(args.cert)
    ca_params, ca_public = files.decode_public(_read(args.ca_pub))
    q = protocol.reconstruct_public(cert_bytes, _read(args.ca_cert), ca_public)
    _write(args.out, files.encode_public(ca_params, q))
    return EXIT_OK


def cmd_sign(args) -> int:
    key = _load_key(args.key)
    m = mceliece.hash_to_message(hashlib.sha256(_read(args.message)).digest(),
                                 key.params.zeta1)
    if isinstance(key, protocol.ExpandedKeyPair):
        s = protocol.expanded_sign(m, key)
    else:
        s = mceliece.sign(m, key)
    _write(args.out, gf2.serialize(s))
    return EXIT_OK


def cmd_verify(args) -> int:
    params, public = files.decode_public(_read(args.pub))
    s = gf2.deserialize(_read(args.sig))
    m = mceliece.hash_to_message(hashlib.sha256(_read(args.message)).digest(),
                                 params.zeta1)
    if s.shape != (public.cols, 1):
        raise CliError("verify", f"signature is {s.rows}x{s.cols}, expected {public.cols}x1",
                       EXIT_VERIFY)
    if mceliece.verify(s, public) != m:
        raise CliError("verify", "recovered message does not match", EXIT_VERIFY)
    print("ok")
    return EXIT_OK


def cmd_encrypt(args) -> int:
    params, public = files.decode_public(_read(args.pub))
    m = mceliece.row(_message_bits(args.message_hex, params.zeta1))
    z = mceliece.encrypt(m, public, rand_gen.Prng(_seed(args)), params.t)
    _write(args.out, gf2.serialize(z))
    return EXIT_OK


def cmd_decrypt(args) -> int:
    key = _load_key(args.key)
    z = gf2.deserialize(_read(args.ct))
    if isinstance(key, protocol.ExpandedKeyPair):
        m = protocol.expanded_decrypt(z, key)
    else:
        m = mceliece.decrypt(z, key)
    _write(args.out, gf2.serialize(m))
    print(m.packed.tobytes().hex())
    return EXIT_OK


def cmd_lengths(args) -> int:
    if args.params:
        pairs = [(args.params.zeta1, args.params.zeta2)]
    else:
        pairs = list(mceliece.SIZE_PRESETS)
    report = certs.length_report(pairs)
    sys.stdout.write(report.to_kv() if args.format == "kv" else report.to_text())
    if args.ecc:
        e = certs.ecc_cert_savings()
        if args.format == "kv":
            print(f"explicit={e.explicit_total} implicit={e.implicit_total} "
                  f"savings={e.implicit_savings} uncompressed={e.uncompressed_point} "
                  f"compressed={e.compressed_point} compression_savings={e.compression_savings}")
        else:
            print(f"\nP-256 explicit VKI+signature: {e.explicit_total} bytes")
            print(f"P-256 implicit VKI+signature: {e.implicit_total} bytes")
            print(f"implicit saves: {e.implicit_savings} bytes")
            print(f"point compression saves: {e.compression_savings} bytes")
    return EXIT_OK


def cmd_bench(args) -> int:
    methods = tuple(m for m in args.methods.split(",") if m)
    unknown = set(methods) - set(rand_gen.METHODS)
    if unknown:
        raise CliError("usage", f"unknown methods {sorted(unknown)}", EXIT_USAGE)
    report = rand_gen.bench_matrix_gen(args.sizes, args.trials, methods)
    sys.stdout.write(report.to_kv() if args.format == "kv" else report.to_text())
    if args.kv_out:
        _write(args.kv_out, report.to_kv().encode())
    return EXIT_OK


def cmd_ecqv_demo(args) -> int:
    for k, v in ecqv.demo_transcript(ee_priv=args.ee_priv, ca_priv=args.ca_priv,
                                     nonce=args.nonce, info=args.info).items():
        print(f"{k}: {v}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pqcmc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def seeded(sp, name="--seed"):
        sp.add_argument(name, type=_u64, default=None)
        sp.add_argument("--entropy", choices=["os"], default=None,
                        help="draw the seed from the OS instead (not reproducible)")

    k = sub.add_parser("keygen", help="generate a keypair")
    k.add_argument("--params", type=_params, required=True)
    seeded(k)
    k.add_argument("--info", type=_hex, default=b"", help="hex info for root.pqcc")
    k.add_argument("--out", required=True, help="output directory")
    k.set_defaults(func=cmd_keygen)

    ca = sub.add_parser("ca", help="certificate authority commands").add_subparsers(
        dest="ca_command", required=True, parser_class=_Parser)
    c = ca.add_parser("issue", help="issue an implicit certificate")
    c.add_argument("--ca-key", required=True)
    c.add_argument("--ca-cert", default=None)
    c.add_argument("--ee-pub")
    c.add_argument("--info", type=_hex, default=b"")
    c.add_argument("--request")
    seeded(c, "--seed-r")
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_ca_issue)
    c = ca.add_parser("cert", help="write the CA self-descriptor")
    c.add_argument("--ca-key", required=True)
    c.add_argument("--info", type=_hex, default=b"")
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_ca_cert)

    ee = sub.add_parser("ee", help="end-entity commands").add_subparsers(
        dest="ee_command", required=True, parser_class=_Parser)
    e = ee.add_parser("request", help="write an issuance request")
    e.add_argument("--ee-pub", required=True)
    e.add_argument("--info", type=_hex, default=b"")
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_ee_request)
    e = ee.add_parser("expand", help="derive the updated private key")
    e.add_argument("--ee-key", required=True)
    e.add_argument("--response", required=True)
    e.add_argument("--ca-cert", required=True)
    e.add_argument("--ca-pub", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--cert-out", default=None, help="also write the bare certificate")
    e.set_defaults(func=cmd_ee_expand)

    r = sub.add_parser("reconstruct", help="derive Q from a certificate")
    r.add_argument("--cert", required=True)
    r.add_argument("--ca-cert", required=True)
    r.add_argument("--ca-pub", required=True)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("sign", help="sign the SHA-256 of a file")
    s.add_argument("--key", required=True)
    s.add_argument("--message", required=True, help="file whose SHA-256 is signed")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sign)

    v = sub.add_parser("verify", help="check a signature against a public key")
    v.add_argument("--pub", required=True)
    v.add_argument("--message", required=True)
    v.add_argument("--sig", required=True)
    v.set_defaults(func=cmd_verify)

    en = sub.add_parser("encrypt", help="encrypt a message row")
    en.add_argument("--pub", required=True)
    en.add_argument("--message-hex", type=_hex, required=True)
    seeded(en)
    en.add_argument("--out", required=True)
    en.set_defaults(func=cmd_encrypt)

    d = sub.add_parser("decrypt", help="decrypt a ciphertext")
    d.add_argument("--key", required=True)
    d.add_argument("--ct", required=True)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_decrypt)

    ln = sub.add_parser("lengths", help="certificate length table")
    grp = ln.add_mutually_exclusive_group()
    grp.add_argument("--params", type=_params)
    grp.add_argument("--all", action="store_true")
    ln.add_argument("--ecc", action="store_true", help="also print P-256 byte arithmetic")
    ln.add_argument("--format", choices=["text", "kv"], default="text")
    ln.set_defaults(func=cmd_lengths)

    b = sub.add_parser("bench", help="benchmarks").add_subparsers(
        dest="bench_command", required=True, parser_class=_Parser)
    m = b.add_parser("matgen", help="invertible-matrix generation timing")
    m.add_argument("--sizes", type=_sizes, default=[1024, 2048, 4096])
    m.add_argument("--trials", type=int, default=5)
    m.add_argument("--methods", default="alg1,baseline")
    m.add_argument("--format", choices=["text", "kv"], default="text")
    m.add_argument("--kv-out", default=None)
    m.set_defaults(func=cmd_bench)

    q = sub.add_parser("ecqv", help="elliptic-curve baseline").add_subparsers(
        dest="ecqv_command", required=True, parser_class=_Parser)
    dm = q.add_parser("demo", help="print a toy ECQV transcript")
    dm.add_argument("--ee-priv", type=int, default=7)
    dm.add_argument("--ca-priv", type=int, default=11)
    dm.add_argument("--nonce", type=int, default=5)
    dm.add_argument("--info", type=_hex, default=b"EE1")
    dm.set_defaults(func=cmd_ecqv_demo)
    return p


_DATA_ERRORS = (
    (protocol.IssuerValidationError, "issuer-validation"),
    (protocol.ProtocolError, "protocol"),
    (mceliece.UncorrectableError, "uncorrectable"),
    (certs.TlvError, "decode"),
    (gf2.MatrixDecodeError, "decode"),
    (gf2.Gf2Error, "matrix"),
    (ecqv.CurveError, "curve"),
    (ValueError, "data"),
)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc.kind}: {exc}\n")
        return exc.code
    except _DATA_ERRORS[-1][0] as exc:
        kind = next(k for cls, k in _DATA_ERRORS if isinstance(exc, cls))
        sys.stderr.write(f"error: {kind}: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
