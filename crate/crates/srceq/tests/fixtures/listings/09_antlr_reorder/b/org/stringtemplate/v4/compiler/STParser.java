// $ANTLR 3.5.3 org/stringtemplate/v4/compiler/STParser.g 2024-02-27 18:45:51

package org.stringtemplate.v4.compiler;

import org.antlr.runtime.BitSet;
import org.antlr.runtime.NoViableAltException;
import org.antlr.runtime.Parser;
import org.antlr.runtime.RecognitionException;
import org.antlr.runtime.TokenStream;

public class STParser extends Parser {

    public STParser(TokenStream input) {
        super(input, null);
    }

    public void mapTemplateRef() throws RecognitionException {
        int alt = 0;
        if ( (input.LA(1)==LPAREN) && (hasNext(3)) ) {
            alt = 3;
        }
        else if ( (input.LA(1)==ID) && (hasNext(1)) ) {
            alt = 1;
        }
        else if ( (input.LA(1)==LCURLY) && (hasNext(2)) ) {
            alt = 2;
        }
        else {
            throw new NoViableAltException("", 28, 0, input);
        }
        dispatch(alt);
    }

    private boolean hasNext(int which) {
        return input.LA(which) > 0;
    }

    private void dispatch(int alt) {
    }

    public static final BitSet FOLLOW_ID = new BitSet(new long[]{0x0000000000000010L});
    public static final BitSet FOLLOW_LCURLY = new BitSet(new long[]{0x0000000000008000L});
    public static final int ID = 25;
    public static final int LCURLY = 20;
    public static final int LPAREN = 14;
}
