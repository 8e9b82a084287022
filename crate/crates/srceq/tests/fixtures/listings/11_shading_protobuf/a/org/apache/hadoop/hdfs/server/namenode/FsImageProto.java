// Generated by the protocol buffer compiler.  DO NOT EDIT!
// source: fsimage.proto

package org.apache.hadoop.hdfs.server.namenode;

import org.apache.hadoop.thirdparty.protobuf.ByteString;
import org.apache.hadoop.thirdparty.protobuf.CodedInputStream;

public final class FsImageProto {

  private FsImageProto() {}

  public static final class FileSummary {

    private ByteString codec_;

    public org.apache.hadoop.thirdparty.protobuf.ByteString getCodecBytes() {
      return codec_;
    }

    public void mergeFrom(org.apache.hadoop.thirdparty.protobuf.CodedInputStream input)
        throws java.io.IOException {
      codec_ = input.readBytes();
    }

    public org.apache.hadoop.thirdparty.protobuf.Parser parserForType() {
      return null;
    }
  }
}
